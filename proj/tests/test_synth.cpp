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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lidist/match.hpp"
#include "lidist/synth.hpp"

using namespace lidist;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("lidist_synth_test_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_script(const std::string& name,
                                   const std::string& body) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

SceneScript basic_script() {
  SceneScript script;
  script.camera = default_camera();
  script.ground_half_extent = 20.0;
  script.seed = 11;
  ObjectSpec wall;
  wall.shape.size = {2.0, 2.0, 2.0};
  wall.shape.center = {10.0, -4.0, 1.0};
  ObjectSpec mover;
  mover.shape.size = {4.0, 2.0, 1.5};
  mover.shape.center = {15.0, 0.0, 1.6};
  mover.motion.kind = MotionSpec::Kind::kConstantVelocity;
  mover.motion.velocity = {0.5, 1.0, 0.0};
  script.objects = {wall, mover};
  return script;
}

// Maps each inter-frame gt column back to its (frame, column) origin.
std::vector<std::pair<std::size_t, Eigen::Index>> interframe_origin(
    const GeneratedScene& scene) {
  std::vector<std::pair<std::size_t, Eigen::Index>> out;
  for (std::size_t s = 0; s < scene.frames.frames.size(); ++s) {
    if (s == scene.frames.keyframe_index) continue;
    for (Eigen::Index i = 0; i < scene.frames.frames[s].cloud.size(); ++i) {
      out.emplace_back(s, i);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("a scene without objects is pure ground with zero flow") {
  SceneScript script;
  script.camera = default_camera();
  script.ground_half_extent = 15.0;
  script.lidar_points_per_frame = 500;
  script.seed = 3;
  const GeneratedScene scene = generate(script);
  REQUIRE(scene.frames.frames.size() == 11);
  REQUIRE(scene.gt_label.size() == 5000);  // 10 inter-frames x 500
  const auto origin = interframe_origin(scene);
  for (std::size_t j = 0; j < scene.gt_label.size(); ++j) {
    CHECK(scene.gt_label[j] == GeneratedScene::kLabelGround);
    const auto [s, i] = origin[j];
    const Eigen::Vector3d start = scene.frames.frames[s].cloud.points.col(i);
    CHECK((scene.gt_keyframe_position.col(static_cast<Eigen::Index>(j)) -
           start)
              .norm() == 0.0);
  }
}

TEST_CASE("the point budget splits between objects and ground") {
  const GeneratedScene scene = generate(basic_script());
  // Wall surface 24 m^2 and mover surface 34 m^2 at 25 pts/m^2.
  for (const Frame& f : scene.frames.frames) {
    CHECK(f.cloud.size() == 4000);
  }
  std::int64_t n_static = 0, n_dynamic = 0, n_ground = 0;
  for (const std::uint8_t l : scene.gt_label) {
    if (l == GeneratedScene::kLabelStatic) ++n_static;
    if (l == GeneratedScene::kLabelDynamic) ++n_dynamic;
    if (l == GeneratedScene::kLabelGround) ++n_ground;
  }
  CHECK(n_static == 10 * 600);
  CHECK(n_dynamic == 10 * 850);
  CHECK(n_ground == 10 * 2550);
}

TEST_CASE("dynamic flow magnitude is speed times time offset") {
  const SceneScript script = basic_script();
  const GeneratedScene scene = generate(script);
  const double key_t = script.keyframe_index * script.frame_period;
  const double speed = script.objects[1].motion.velocity.norm();
  const auto origin = interframe_origin(scene);
  std::size_t dynamic_seen = 0;
  for (std::size_t j = 0; j < scene.gt_label.size(); ++j) {
    const auto [s, i] = origin[j];
    const Eigen::Vector3d start = scene.frames.frames[s].cloud.points.col(i);
    const double flow =
        (scene.gt_keyframe_position.col(static_cast<Eigen::Index>(j)) - start)
            .norm();
    if (scene.gt_label[j] == GeneratedScene::kLabelDynamic) {
      const double dt =
          std::abs(key_t - scene.frames.frames[s].cloud.timestamp);
      CHECK(std::abs(flow - speed * dt) < 1e-12);
      ++dynamic_seen;
    } else {
      CHECK(flow == 0.0);
    }
  }
  CHECK(dynamic_seen == 8500);
}

TEST_CASE("ground truth lives in the keyframe sensor frame under ego motion") {
  SceneScript script = basic_script();
  script.objects.pop_back();  // static world only
  script.ego_velocity = {5.0, 0.0, 0.0};
  const GeneratedScene scene = generate(script);

  const RigidTransform key_pose_inv = scene.frames.keyframe().pose.inverse();
  const auto origin = interframe_origin(scene);
  for (std::size_t j = 0; j < scene.gt_label.size(); ++j) {
    const auto [s, i] = origin[j];
    const Frame& frame = scene.frames.frames[s];
    CHECK((frame.pose.translation -
           Eigen::Vector3d(5.0 * frame.cloud.timestamp, 0.0, 0.0))
              .norm() < 1e-12);
    const Eigen::Vector3d start_in_key =
        compose(key_pose_inv, frame.pose)(frame.cloud.points.col(i));
    CHECK((scene.gt_keyframe_position.col(static_cast<Eigen::Index>(j)) -
           start_in_key)
              .norm() < 1e-9);
  }
}

TEST_CASE("generation is bit-identical across runs") {
  const SceneScript script = basic_script();
  const GeneratedScene a = generate(script);
  const GeneratedScene b = generate(script);
  REQUIRE(a.frames.frames.size() == b.frames.frames.size());
  for (std::size_t s = 0; s < a.frames.frames.size(); ++s) {
    CHECK((a.frames.frames[s].cloud.points.array() ==
           b.frames.frames[s].cloud.points.array())
              .all());
  }
  CHECK((a.gt_keyframe_position.array() == b.gt_keyframe_position.array())
            .all());
  CHECK(a.gt_label == b.gt_label);
}

TEST_CASE("points beyond the range limit are dropped") {
  SceneScript script;
  script.camera = default_camera();
  script.ground_half_extent = 10.0;
  script.lidar_max_range = 25.0;
  script.seed = 17;
  ObjectSpec wall;
  wall.shape.size = {2.0, 2.0, 2.0};
  wall.shape.center = {12.0, 0.0, 1.0};
  ObjectSpec far_mover;
  far_mover.shape.size = {2.0, 2.0, 2.0};
  far_mover.shape.center = {40.0, 0.0, 1.6};
  far_mover.motion.kind = MotionSpec::Kind::kConstantVelocity;
  far_mover.motion.velocity = {0.0, 1.0, 0.0};
  script.objects = {wall, far_mover};

  const GeneratedScene scene = generate(script);
  // Budget 4000 = 600 (wall) + 600 (mover, fully out of range) + 2800 ground.
  for (const Frame& f : scene.frames.frames) {
    CHECK(f.cloud.size() == 3400);
    for (Eigen::Index i = 0; i < f.cloud.size(); ++i) {
      CHECK(f.cloud.points.col(i).norm() <= 25.0 + 1e-9);
    }
  }
  for (const std::uint8_t l : scene.gt_label) {
    CHECK(l != GeneratedScene::kLabelDynamic);
  }
}

TEST_CASE("frame clocks follow the script and the keyframe is preserved") {
  SceneScript script = basic_script();
  script.frame_count = 7;
  script.keyframe_index = 2;
  script.frame_period = 0.1;
  const GeneratedScene scene = generate(script);
  scene.frames.validate();
  CHECK(scene.frames.keyframe_index == 2);
  REQUIRE(scene.frames.frames.size() == 7);
  for (int k = 0; k < 7; ++k) {
    CHECK(scene.frames.frames[static_cast<std::size_t>(k)].cloud.timestamp ==
          doctest::Approx(0.1 * k));
  }
}

TEST_CASE("the tiled superpixel map covers the image") {
  SceneScript script = basic_script();
  script.superpixel_grid = {{16, 12}};
  const GeneratedScene scene = generate(script);
  REQUIRE(scene.frames.superpixels.has_value());
  const SuperpixelMap& map = *scene.frames.superpixels;
  CHECK(map.width == 640);
  CHECK(map.height == 480);
  CHECK(map.validate() == 192);
  CHECK(map.at(0, 0) == 0);
  CHECK(map.at(639, 479) == 191);
  CHECK(map.at(320, 240) == 6 * 16 + 8);

  SceneScript plain = basic_script();
  CHECK(!generate(plain).frames.superpixels.has_value());
}

TEST_CASE("object poses follow their motion model") {
  ObjectSpec obj;
  obj.shape.center = {3.0, -1.0, 0.5};
  obj.shape.yaw = 0.3;

  SUBCASE("a static object ignores time") {
    const RigidTransform p0 = object_pose(obj, 0.0);
    const RigidTransform p9 = object_pose(obj, 9.0);
    CHECK((p0.translation - p9.translation).norm() == 0.0);
    CHECK((p0.rotation - p9.rotation).norm() == 0.0);
    CHECK((p0.translation - obj.shape.center).norm() < 1e-15);
  }

  SUBCASE("constant velocity translates linearly") {
    obj.motion.kind = MotionSpec::Kind::kConstantVelocity;
    obj.motion.velocity = {2.0, 0.5, -0.25};
    const RigidTransform p = object_pose(obj, 0.8);
    const Eigen::Vector3d want =
        obj.shape.center + 0.8 * obj.motion.velocity;
    CHECK((p.translation - want).norm() < 1e-12);
    CHECK((p.rotation - rotation_z(0.3).rotation).norm() < 1e-15);
  }

  SUBCASE("constant turn matches a numerical integration") {
    obj.motion.kind = MotionSpec::Kind::kConstantTurn;
    obj.motion.velocity = {2.0, 0.5, 0.1};
    obj.motion.yaw_rate = 0.8;
    const double t = 0.7;
    const RigidTransform p = object_pose(obj, t);

    // Simpson integration of Rz(w s) * v over [0, t].
    const auto integrand = [&](double s) -> Eigen::Vector3d {
      return rotation_z(obj.motion.yaw_rate * s).rotation *
             obj.motion.velocity;
    };
    const int n = 2000;  // even
    const double h = t / n;
    Eigen::Vector3d sum = integrand(0.0) + integrand(t);
    for (int k = 1; k < n; ++k) {
      sum += (k % 2 == 1 ? 4.0 : 2.0) * integrand(k * h);
    }
    const Eigen::Vector3d offset = sum * (h / 3.0);
    CHECK((p.translation - (obj.shape.center + offset)).norm() < 1e-9);
    CHECK((p.rotation - rotation_z(0.3 + 0.8 * t).rotation).norm() < 1e-12);
  }

  SUBCASE("a vanishing turn rate degrades to constant velocity") {
    obj.motion.kind = MotionSpec::Kind::kConstantTurn;
    obj.motion.velocity = {2.0, 0.5, 0.0};
    obj.motion.yaw_rate = 1e-9;
    const RigidTransform turn = object_pose(obj, 0.5);
    obj.motion.kind = MotionSpec::Kind::kConstantVelocity;
    const RigidTransform straight = object_pose(obj, 0.5);
    CHECK((turn.translation - straight.translation).norm() < 1e-9);
  }
}

TEST_CASE("the default camera looks along sensor +x") {
  const CameraModel cam = default_camera();
  Eigen::Matrix3Xd pts(3, 3);
  pts.col(0) = Eigen::Vector3d(10, 0, 0);  // straight ahead
  pts.col(1) = Eigen::Vector3d(10, 1, 0);  // one meter to the left
  pts.col(2) = Eigen::Vector3d(10, 0, 1);  // one meter up
  const auto proj = project(cam, make_cloud(pts));
  REQUIRE(proj[0].in_view);
  CHECK(proj[0].u == doctest::Approx(320.0));
  CHECK(proj[0].v == doctest::Approx(240.0));
  CHECK(proj[0].depth == doctest::Approx(10.0));
  CHECK(proj[1].u == doctest::Approx(270.0));  // left decreases u
  CHECK(proj[2].v == doctest::Approx(190.0));  // up decreases v
}

TEST_CASE("scene scripts parse with defaults and overrides") {
  const auto path = write_script("good.json", R"({
    "seed": 7,
    "frame_count": 5,
    "frame_period": 0.1,
    "keyframe_index": 2,
    "ego_velocity": [1, 0, 0],
    "ground": {"half_extent": 15, "sigma": 0.01},
    "lidar": {"max_range": 80, "points_per_frame": 1000},
    "superpixel_grid": [8, 6],
    "static_objects": [{"size": [2, 1, 1], "center": [10, 0, 0.5]}],
    "moving_objects": [{
      "size": [1, 1, 1],
      "center": [12, 2, 1.5],
      "motion": {"kind": "constant_turn", "velocity": [1, 0, 0],
                 "yaw_rate": 0.3}
    }]
  })");
  const SceneScript script = read_scene_script(path);
  CHECK(script.seed == 7);
  CHECK(script.frame_count == 5);
  CHECK(script.frame_period == doctest::Approx(0.1));
  CHECK(script.keyframe_index == 2);
  CHECK(script.ego_velocity.x() == doctest::Approx(1.0));
  CHECK(script.ground_half_extent == doctest::Approx(15.0));
  CHECK(script.ground_sigma == doctest::Approx(0.01));
  CHECK(script.lidar_max_range == doctest::Approx(80.0));
  CHECK(script.lidar_points_per_frame == 1000);
  REQUIRE(script.superpixel_grid.has_value());
  CHECK(script.superpixel_grid->first == 8);
  REQUIRE(script.objects.size() == 2);
  CHECK(script.objects[0].motion.kind == MotionSpec::Kind::kNone);
  CHECK(script.objects[1].motion.kind == MotionSpec::Kind::kConstantTurn);
  CHECK(script.objects[1].motion.yaw_rate == doctest::Approx(0.3));

  const SceneScript bare = read_scene_script(write_script("bare.json", "{}"));
  CHECK(bare.frame_count == 11);
  CHECK(bare.keyframe_index == 5);
  CHECK(bare.lidar_points_per_frame == 4000);
  CHECK(bare.objects.empty());
}

TEST_CASE("bad scene scripts are rejected") {
  CHECK_THROWS_AS(read_scene_script(scratch_dir() / "missing.json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      read_scene_script(write_script("mangled.json", "{not json")),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      read_scene_script(write_script("unknown.json", R"({"frames": 3})")),
      "unknown field 'frames' in scene script", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      read_scene_script(write_script("static_motion.json", R"({
        "static_objects": [{
          "size": [1, 1, 1], "center": [5, 0, 0.5],
          "motion": {"kind": "constant_velocity", "velocity": [1, 0, 0]}
        }]
      })")),
      "static objects cannot have motion", std::invalid_argument);
  CHECK_THROWS(read_scene_script(
      write_script("no_size.json", R"({
        "static_objects": [{"center": [5, 0, 0.5]}]
      })")));
  CHECK_THROWS_AS(
      read_scene_script(write_script("bad_kind.json", R"({
        "moving_objects": [{
          "size": [1, 1, 1], "center": [5, 0, 0.5],
          "motion": {"kind": "teleport", "velocity": [1, 0, 0]}
        }]
      })")),
      std::invalid_argument);
}

TEST_CASE("script validation guards the numeric ranges") {
  SceneScript script = basic_script();
  script.keyframe_index = 11;
  CHECK_THROWS_AS(script.validate(), std::invalid_argument);
  script = basic_script();
  script.frame_period = 0.0;
  CHECK_THROWS_AS(script.validate(), std::invalid_argument);
  script = basic_script();
  script.objects[0].shape.size.y() = 0.0;
  CHECK_THROWS_AS(script.validate(), std::invalid_argument);
  script = basic_script();
  script.superpixel_grid = {{1000, 2}};
  CHECK_THROWS_AS(script.validate(), std::invalid_argument);
}

TEST_CASE("surface areas back the density-based budgets") {
  PrimitiveSpec box;
  box.size = {4.0, 2.0, 1.5};
  CHECK(box.surface_area() == doctest::Approx(34.0));
  PrimitiveSpec cyl;
  cyl.shape = PrimitiveSpec::Shape::kCylinder;
  cyl.size = {1.0, 0.0, 2.0};  // radius 1, height 2
  CHECK(cyl.surface_area() == doctest::Approx(6.0 * kPi));
}

TEST_CASE("augmentation applies flips in the stated frame") {
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(1, 2, 3);
  AugmentParams params;
  params.flip_x = true;
  params.cuboid_center = {100, 100, 100};
  params.cuboid_size = {1, 1, 1};
  const PointCloud out = apply_augment(make_cloud(pts), params);
  REQUIRE(out.size() == 1);
  CHECK(out.points.col(0) == Eigen::Vector3d(-1, 2, 3));

  params.flip_x = false;
  params.z_angle = kPi / 2.0;
  const PointCloud rotated = apply_augment(make_cloud(pts), params);
  CHECK((rotated.points.col(0) - Eigen::Vector3d(-2, 1, 3)).norm() < 1e-12);
}

TEST_CASE("identity parameters leave a cloud bitwise unchanged") {
  Rng rng(23);
  Eigen::Matrix3Xd pts(3, 100);
  for (Eigen::Index i = 0; i < 100; ++i) {
    pts.col(i) = Eigen::Vector3d(rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0),
                                 rng.uniform(1.0, 5.0));
  }
  const PointCloud cloud = make_cloud(pts);
  AugmentParams params;  // zero angle, no flips, cuboid collapsed at origin
  const PointCloud out = apply_augment(cloud, params);
  REQUIRE(out.size() == 100);
  CHECK((out.points.array() == cloud.points.array()).all());
  CHECK(out.source_index == cloud.source_index);
}

TEST_CASE("rotation and flips preserve pairwise distances") {
  Rng rng(29);
  Eigen::Matrix3Xd pts(3, 60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    pts.col(i) = Eigen::Vector3d(rng.uniform(-5.0, 5.0),
                                 rng.uniform(-5.0, 5.0),
                                 rng.uniform(0.0, 3.0));
  }
  AugmentParams params;
  params.z_angle = 1.234;
  params.flip_y = true;
  params.cuboid_center = {500, 500, 500};
  params.cuboid_size = {2, 2, 2};
  const PointCloud out = apply_augment(make_cloud(pts), params);
  REQUIRE(out.size() == 60);
  for (Eigen::Index a = 0; a < 60; a += 7) {
    for (Eigen::Index b = a + 1; b < 60; b += 11) {
      const double before = (pts.col(a) - pts.col(b)).norm();
      const double after = (out.points.col(a) - out.points.col(b)).norm();
      CHECK(std::abs(before - after) < 1e-12);
    }
  }
}

TEST_CASE("the cuboid cut is inclusive at its faces") {
  Eigen::Matrix3Xd pts(3, 3);
  pts.col(0) = Eigen::Vector3d(1.0, 0.0, 0.0);          // exactly on the face
  pts.col(1) = Eigen::Vector3d(1.0 + 1e-9, 0.0, 0.0);   // just outside
  pts.col(2) = Eigen::Vector3d(0.0, 0.0, 0.0);          // center
  AugmentParams params;
  params.cuboid_center = Eigen::Vector3d::Zero();
  params.cuboid_size = {2.0, 2.0, 2.0};
  const PointCloud out = apply_augment(make_cloud(pts), params);
  REQUIRE(out.size() == 1);
  CHECK(out.source_index == std::vector<std::int64_t>{1});
  CHECK(out.points.col(0).x() == doctest::Approx(1.0 + 1e-9));
}

TEST_CASE("survivors keep their original indices through a cut") {
  Eigen::Matrix3Xd pts(3, 4);
  pts.col(0) = Eigen::Vector3d(5, 5, 0);
  pts.col(1) = Eigen::Vector3d(0, 0, 0);  // removed
  pts.col(2) = Eigen::Vector3d(-5, 5, 0);
  pts.col(3) = Eigen::Vector3d(0.1, -0.1, 0);  // removed
  PointCloud cloud = make_cloud(pts);
  cloud.source_index = {40, 41, 42, 43};
  AugmentParams params;
  params.cuboid_center = Eigen::Vector3d::Zero();
  params.cuboid_size = {1.0, 1.0, 1.0};
  const PointCloud out = apply_augment(cloud, params);
  CHECK(out.source_index == std::vector<std::int64_t>{40, 42});
}

TEST_CASE("seeded augmentation is deterministic and in range") {
  Rng rng(31);
  Eigen::Matrix3Xd pts(3, 500);
  for (Eigen::Index i = 0; i < 500; ++i) {
    pts.col(i) = Eigen::Vector3d(rng.uniform(-20.0, 20.0),
                                 rng.uniform(-20.0, 20.0),
                                 rng.uniform(0.0, 4.0));
  }
  const PointCloud cloud = make_cloud(pts);

  Rng draw_rng(7);
  const AugmentParams params = draw_augment(cloud, draw_rng);
  CHECK(params.z_angle >= 0.0);
  CHECK(params.z_angle < 2.0 * kPi);
  for (int a = 0; a < 3; ++a) {
    CHECK(params.cuboid_size[a] >= 2.0);
    CHECK(params.cuboid_size[a] <= 10.0);
  }
  Rng draw_rng2(7);
  const AugmentParams again = draw_augment(cloud, draw_rng2);
  CHECK(again.z_angle == params.z_angle);
  CHECK(again.flip_x == params.flip_x);
  CHECK(again.flip_y == params.flip_y);
  CHECK((again.cuboid_center.array() == params.cuboid_center.array()).all());

  const PointCloud once = augment(cloud, 99);
  const PointCloud twice = augment(cloud, 99);
  REQUIRE(once.size() == twice.size());
  CHECK((once.points.array() == twice.points.array()).all());
  CHECK(once.source_index == twice.source_index);
  CHECK(once.size() < cloud.size());  // the cuboid sits inside the bbox
}

TEST_CASE("augmenting an empty cloud is an error") {
  PointCloud empty;
  empty.points.resize(3, 0);
  CHECK_THROWS_AS(augment(empty, 1), std::invalid_argument);
}
