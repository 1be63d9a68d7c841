// Copyright 2026 The lidist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lidist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace lidist {
namespace {

using nlohmann::json;

// Uniform sample on the surface of a box with full extents `size`, centered
// at the origin.
Eigen::Vector3d sample_box_surface(const Eigen::Vector3d& size, Rng& rng) {
  const double ax = size.y() * size.z();  // +-x faces
  const double ay = size.x() * size.z();
  const double az = size.x() * size.y();
  const double total = 2.0 * (ax + ay + az);
  double pick = rng.uniform01() * total;
  int face_axis = 0;
  if (pick < 2.0 * ax) {
    face_axis = 0;
  } else if (pick < 2.0 * (ax + ay)) {
    face_axis = 1;
    pick -= 2.0 * ax;
  } else {
    face_axis = 2;
    pick -= 2.0 * (ax + ay);
  }
  const double area = face_axis == 0 ? ax : face_axis == 1 ? ay : az;
  const double sign = pick < area ? -0.5 : 0.5;
  Eigen::Vector3d p;
  p[face_axis] = sign * size[face_axis];
  const int u_axis = (face_axis + 1) % 3;
  const int v_axis = (face_axis + 2) % 3;
  p[u_axis] = (rng.uniform01() - 0.5) * size[u_axis];
  p[v_axis] = (rng.uniform01() - 0.5) * size[v_axis];
  return p;
}

// Uniform sample on a closed cylinder (radius r, height h) centered at the
// origin with its axis along +z.
Eigen::Vector3d sample_cylinder_surface(double r, double h, Rng& rng) {
  const double lateral = 2.0 * kPi * r * h;
  const double cap = kPi * r * r;
  const double pick = rng.uniform01() * (lateral + 2.0 * cap);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  if (pick < lateral) {
    const double z = (rng.uniform01() - 0.5) * h;
    return {r * std::cos(phi), r * std::sin(phi), z};
  }
  const double rr = r * std::sqrt(rng.uniform01());
  const double z = pick < lateral + cap ? -0.5 * h : 0.5 * h;
  return {rr * std::cos(phi), rr * std::sin(phi), z};
}

Eigen::Matrix3Xd sample_surface(const PrimitiveSpec& prim, std::int64_t count,
                                Rng& rng) {
  Eigen::Matrix3Xd out(3, count);
  for (std::int64_t i = 0; i < count; ++i) {
    out.col(static_cast<Eigen::Index>(i)) =
        prim.shape == PrimitiveSpec::Shape::kBox
            ? sample_box_surface(prim.size, rng)
            : sample_cylinder_surface(prim.size[0], prim.size[2], rng);
  }
  return out;
}

std::int64_t object_point_count(const PrimitiveSpec& prim) {
  return std::max<std::int64_t>(
      1, std::llround(prim.density * prim.surface_area()));
}

Eigen::Vector3d vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(std::string(what) + " must be 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument(std::string("unknown field '") + key +
                                  "' in " + what);
    }
  }
}

ObjectSpec object_from(const json& j, bool moving) {
  check_keys(j, {"shape", "size", "center", "yaw", "density", "motion"},
             moving ? "moving object" : "static object");
  ObjectSpec obj;
  const std::string shape = j.value("shape", std::string("box"));
  if (shape == "box") {
    obj.shape.shape = PrimitiveSpec::Shape::kBox;
  } else if (shape == "cylinder") {
    obj.shape.shape = PrimitiveSpec::Shape::kCylinder;
  } else {
    throw std::invalid_argument("object shape must be box or cylinder");
  }
  obj.shape.size = vec3_from(j.at("size"), "object size");
  obj.shape.center = vec3_from(j.at("center"), "object center");
  obj.shape.yaw = j.value("yaw", 0.0);
  obj.shape.density = j.value("density", 25.0);
  if (moving) {
    const json& mj = j.at("motion");
    check_keys(mj, {"kind", "velocity", "yaw_rate"}, "motion");
    const std::string kind = mj.at("kind").get<std::string>();
    if (kind == "constant_velocity") {
      obj.motion.kind = MotionSpec::Kind::kConstantVelocity;
    } else if (kind == "constant_turn") {
      obj.motion.kind = MotionSpec::Kind::kConstantTurn;
    } else {
      throw std::invalid_argument(
          "motion kind must be constant_velocity or constant_turn");
    }
    obj.motion.velocity = vec3_from(mj.at("velocity"), "motion velocity");
    obj.motion.yaw_rate = mj.value("yaw_rate", 0.0);
  }
  return obj;
}

}  // namespace

double PrimitiveSpec::surface_area() const {
  if (shape == Shape::kBox) {
    return 2.0 * (size.x() * size.y() + size.y() * size.z() +
                  size.x() * size.z());
  }
  const double r = size[0];
  const double h = size[2];
  return 2.0 * kPi * r * h + 2.0 * kPi * r * r;
}

void SceneScript::validate() const {
  if (frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
  if (!(frame_period > 0.0)) {
    throw std::invalid_argument("frame_period must be > 0");
  }
  if (keyframe_index >= static_cast<std::size_t>(frame_count)) {
    throw std::invalid_argument("keyframe_index out of range");
  }
  if (!(ground_half_extent > 0.0)) {
    throw std::invalid_argument("ground_half_extent must be > 0");
  }
  if (ground_sigma < 0.0) {
    throw std::invalid_argument("ground_sigma must be >= 0");
  }
  if (!(lidar_max_range > 0.0) || lidar_points_per_frame < 0) {
    throw std::invalid_argument("lidar config invalid");
  }
  for (const ObjectSpec& obj : objects) {
    if (!(obj.shape.density > 0.0) || !(obj.shape.size.minCoeff() > 0.0)) {
      throw std::invalid_argument("object sizes and density must be > 0");
    }
  }
  camera.validate();
  if (superpixel_grid) {
    const auto [nx, ny] = *superpixel_grid;
    if (nx < 1 || ny < 1 || nx > camera.image_width ||
        ny > camera.image_height) {
      throw std::invalid_argument("superpixel grid does not fit the image");
    }
  }
}

RigidTransform object_pose(const ObjectSpec& object, double t) {
  const PrimitiveSpec& prim = object.shape;
  switch (object.motion.kind) {
    case MotionSpec::Kind::kNone:
      return compose(translation(prim.center), rotation_z(prim.yaw));
    case MotionSpec::Kind::kConstantVelocity:
      return compose(translation(prim.center + object.motion.velocity * t),
                     rotation_z(prim.yaw));
    case MotionSpec::Kind::kConstantTurn: {
      const double w = object.motion.yaw_rate;
      const Eigen::Vector3d v = object.motion.velocity;
      Eigen::Vector3d offset;
      if (std::abs(w) < 1e-12) {
        offset = v * t;
      } else {
        // Integral of Rz(w*tau) * v over [0, t].
        const double s = std::sin(w * t);
        const double c = std::cos(w * t);
        offset = {(s * v.x() - (1.0 - c) * v.y()) / w,
                  ((1.0 - c) * v.x() + s * v.y()) / w, v.z() * t};
      }
      return compose(translation(prim.center + offset),
                     rotation_z(prim.yaw + w * t));
    }
  }
  throw std::logic_error("unreachable motion kind");
}

CameraModel default_camera() {
  CameraModel cam;
  cam.intrinsics << 500.0, 0.0, 320.0, 0.0, 500.0, 240.0, 0.0, 0.0, 1.0;
  // Sensor x-forward becomes camera +z, sensor -y becomes image x (right),
  // sensor -z becomes image y (down).
  cam.extrinsics.rotation << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  cam.extrinsics.translation.setZero();
  cam.image_width = 640;
  cam.image_height = 480;
  return cam;
}

GeneratedScene generate(const SceneScript& script) {
  script.validate();

  // Persistent surface samples, one stream per object.
  std::vector<Eigen::Matrix3Xd> local_points;
  std::vector<std::int64_t> counts;
  std::int64_t object_total = 0;
  for (std::size_t o = 0; o < script.objects.size(); ++o) {
    const std::int64_t count = object_point_count(script.objects[o].shape);
    Rng rng(derive_seed(script.seed, 1000 + o));
    local_points.push_back(sample_surface(script.objects[o].shape, count, rng));
    counts.push_back(count);
    object_total += count;
  }
  const std::int64_t ground_count =
      std::max<std::int64_t>(0, script.lidar_points_per_frame - object_total);

  const double key_t = script.keyframe_index * script.frame_period;
  const RigidTransform key_ego = translation(script.ego_velocity * key_t);
  const RigidTransform key_ego_inv = key_ego.inverse();

  GeneratedScene out;
  out.frames.keyframe_index = script.keyframe_index;
  out.frames.camera = script.camera;

  std::vector<Eigen::Vector3d> gt_positions;
  std::vector<std::uint8_t> gt_labels;

  for (int k = 0; k < script.frame_count; ++k) {
    const double t = k * script.frame_period;
    const RigidTransform ego = translation(script.ego_velocity * t);
    const RigidTransform ego_inv = ego.inverse();
    Rng rng(derive_seed(script.seed, static_cast<std::uint64_t>(k)));

    std::vector<Eigen::Vector3d> sensor_points;
    std::vector<Eigen::Vector3d> key_world_points;  // parallel, at key time
    std::vector<std::uint8_t> labels;
    const auto emit = [&](const Eigen::Vector3d& world,
                          const Eigen::Vector3d& key_world,
                          std::uint8_t label) {
      if ((world - ego.translation).norm() > script.lidar_max_range) return;
      sensor_points.push_back(ego_inv(world));
      key_world_points.push_back(key_world);
      labels.push_back(label);
    };

    for (std::int64_t i = 0; i < ground_count; ++i) {
      const double x =
          rng.uniform(-script.ground_half_extent, script.ground_half_extent);
      const double y =
          rng.uniform(-script.ground_half_extent, script.ground_half_extent);
      const double z = rng.normal(0.0, script.ground_sigma);
      const Eigen::Vector3d world(x, y, z);
      emit(world, world, GeneratedScene::kLabelGround);
    }
    for (std::size_t o = 0; o < script.objects.size(); ++o) {
      const ObjectSpec& obj = script.objects[o];
      const bool moving = obj.motion.kind != MotionSpec::Kind::kNone;
      const RigidTransform pose_now = object_pose(obj, t);
      const RigidTransform pose_key = object_pose(obj, key_t);
      for (Eigen::Index i = 0; i < local_points[o].cols(); ++i) {
        const Eigen::Vector3d local = local_points[o].col(i);
        emit(pose_now(local), pose_key(local),
             moving ? GeneratedScene::kLabelDynamic
                    : GeneratedScene::kLabelStatic);
      }
    }

    Eigen::Matrix3Xd pts(3, static_cast<Eigen::Index>(sensor_points.size()));
    for (std::size_t i = 0; i < sensor_points.size(); ++i) {
      pts.col(static_cast<Eigen::Index>(i)) = sensor_points[i];
    }
    Frame frame;
    frame.cloud = make_cloud(std::move(pts), t);
    frame.pose = ego;
    out.frames.frames.push_back(std::move(frame));

    if (static_cast<std::size_t>(k) != script.keyframe_index) {
      for (std::size_t i = 0; i < key_world_points.size(); ++i) {
        gt_positions.push_back(key_ego_inv(key_world_points[i]));
        gt_labels.push_back(labels[i]);
      }
    }
  }

  if (script.superpixel_grid) {
    const auto [nx, ny] = *script.superpixel_grid;
    SuperpixelMap map;
    map.width = script.camera.image_width;
    map.height = script.camera.image_height;
    map.labels.resize(static_cast<std::size_t>(map.width) * map.height);
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const int tx = static_cast<int>(
            static_cast<std::int64_t>(x) * nx / map.width);
        const int ty = static_cast<int>(
            static_cast<std::int64_t>(y) * ny / map.height);
        map.labels[static_cast<std::size_t>(y) * map.width + x] =
            static_cast<std::uint32_t>(ty * nx + tx);
      }
    }
    out.frames.superpixels = std::move(map);
  }

  out.gt_keyframe_position.resize(3,
                                  static_cast<Eigen::Index>(gt_positions.size()));
  for (std::size_t i = 0; i < gt_positions.size(); ++i) {
    out.gt_keyframe_position.col(static_cast<Eigen::Index>(i)) =
        gt_positions[i];
  }
  out.gt_label = std::move(gt_labels);
  out.frames.validate();
  return out;
}

SceneScript read_scene_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scene script: " + path.string());
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument("malformed JSON: " + path.string());
  }
  check_keys(j,
             {"seed", "frame_count", "frame_period", "keyframe_index",
              "ego_velocity", "ground", "lidar", "camera", "superpixel_grid",
              "static_objects", "moving_objects"},
             "scene script");
  SceneScript script;
  script.seed = j.value("seed", 0ull);
  script.frame_count = j.value("frame_count", 11);
  script.frame_period = j.value("frame_period", 0.05);
  script.keyframe_index =
      j.value("keyframe_index", static_cast<std::size_t>(script.frame_count / 2));
  if (j.contains("ego_velocity")) {
    script.ego_velocity = vec3_from(j["ego_velocity"], "ego_velocity");
  }
  if (j.contains("ground")) {
    const json& gj = j["ground"];
    check_keys(gj, {"half_extent", "sigma"}, "ground");
    script.ground_half_extent = gj.value("half_extent", 40.0);
    script.ground_sigma = gj.value("sigma", 0.0);
  }
  if (j.contains("lidar")) {
    const json& lj = j["lidar"];
    check_keys(lj, {"max_range", "points_per_frame"}, "lidar");
    script.lidar_max_range = lj.value("max_range", 120.0);
    script.lidar_points_per_frame =
        lj.value("points_per_frame", static_cast<std::int64_t>(4000));
  }
  script.camera = default_camera();
  if (j.contains("camera")) {
    const json& cj = j["camera"];
    check_keys(cj, {"fx", "fy", "cx", "cy", "width", "height", "extrinsics"},
               "camera");
    script.camera.image_width = cj.value("width", 640);
    script.camera.image_height = cj.value("height", 480);
    script.camera.intrinsics.setIdentity();
    script.camera.intrinsics(0, 0) = cj.value("fx", 500.0);
    script.camera.intrinsics(1, 1) = cj.value("fy", 500.0);
    script.camera.intrinsics(0, 2) =
        cj.value("cx", script.camera.image_width / 2.0);
    script.camera.intrinsics(1, 2) =
        cj.value("cy", script.camera.image_height / 2.0);
    if (cj.contains("extrinsics")) {
      const json& ej = cj["extrinsics"];
      if (!ej.is_array() || ej.size() != 16) {
        throw std::invalid_argument("camera extrinsics must be 16 numbers");
      }
      Eigen::Matrix4d m;
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) m(r, c) = ej[4 * r + c].get<double>();
      }
      script.camera.extrinsics = RigidTransform::from_matrix(m);
    }
  }
  if (j.contains("superpixel_grid")) {
    const json& sj = j["superpixel_grid"];
    if (!sj.is_array() || sj.size() != 2) {
      throw std::invalid_argument("superpixel_grid must be [nx, ny]");
    }
    script.superpixel_grid = {sj[0].get<int>(), sj[1].get<int>()};
  }
  if (j.contains("static_objects")) {
    for (const json& oj : j["static_objects"]) {
      if (oj.contains("motion")) {
        throw std::invalid_argument("static objects cannot have motion");
      }
      script.objects.push_back(object_from(oj, false));
    }
  }
  if (j.contains("moving_objects")) {
    for (const json& oj : j["moving_objects"]) {
      script.objects.push_back(object_from(oj, true));
    }
  }
  script.validate();
  return script;
}

AugmentParams draw_augment(const PointCloud& cloud, Rng& rng) {
  AugmentParams params;
  params.z_angle = rng.uniform(0.0, 2.0 * kPi);
  params.flip_x = rng.bernoulli(0.5);
  params.flip_y = rng.bernoulli(0.5);
  for (int a = 0; a < 3; ++a) {
    params.cuboid_size[a] = rng.uniform(2.0, 10.0);
  }
  // The cuboid center is uniform over the bounding box of the cloud as it
  // stands when the drop happens, i.e. after rotation and flips.
  const RigidTransform rot = rotation_z(params.z_angle);
  Eigen::Vector3d lo =
      Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    Eigen::Vector3d p = rot(cloud.points.col(i));
    if (params.flip_x) p.x() = -p.x();
    if (params.flip_y) p.y() = -p.y();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  for (int a = 0; a < 3; ++a) {
    params.cuboid_center[a] = rng.uniform(lo[a], hi[a]);
  }
  return params;
}

PointCloud apply_augment(const PointCloud& cloud, const AugmentParams& params) {
  if (cloud.size() == 0) throw std::invalid_argument("empty cloud");
  const RigidTransform rot = rotation_z(params.z_angle);
  Eigen::Matrix3Xd moved = rot.rotation * cloud.points;
  if (params.flip_x) moved.row(0) = -moved.row(0);
  if (params.flip_y) moved.row(1) = -moved.row(1);

  const Eigen::Vector3d half = params.cuboid_size / 2.0;
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(moved.cols()));
  for (Eigen::Index i = 0; i < moved.cols(); ++i) {
    const Eigen::Vector3d d =
        (moved.col(i) - params.cuboid_center).cwiseAbs();
    const bool inside =
        d.x() <= half.x() && d.y() <= half.y() && d.z() <= half.z();
    if (!inside) keep.push_back(i);
  }
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.points.resize(3, static_cast<Eigen::Index>(keep.size()));
  out.source_index.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.points.col(static_cast<Eigen::Index>(k)) = moved.col(keep[k]);
    out.source_index.push_back(
        cloud.source_index[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

}  // namespace lidist
