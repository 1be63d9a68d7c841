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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "lidist/core.hpp"
#include "lidist/rng.hpp"

namespace lidist {

// Surface primitive placed in the world. Box sizes are full extents; a
// cylinder uses size[0] as radius and size[2] as height (size[1] ignored).
// `density` is points per square meter of surface.
struct PrimitiveSpec {
  enum class Shape { kBox, kCylinder };
  Shape shape = Shape::kBox;
  Eigen::Vector3d size = {1.0, 1.0, 1.0};
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double yaw = 0.0;  // radians about +z
  double density = 25.0;

  double surface_area() const;
};

struct MotionSpec {
  enum class Kind { kNone, kConstantVelocity, kConstantTurn };
  Kind kind = Kind::kNone;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // m/s at t = 0
  double yaw_rate = 0.0;  // rad/s, used by kConstantTurn
};

struct ObjectSpec {
  PrimitiveSpec shape;
  MotionSpec motion;  // kNone marks a static object
};

// Everything needed to generate a deterministic multi-frame scene. The
// LiDAR budget `lidar_points_per_frame` is split between objects (by their
// density-derived counts) and ground (the remainder). The sensor frame is
// x-forward, y-left, z-up; the default camera looks along +x.
struct SceneScript {
  double ground_half_extent = 40.0;  // ground square [-e, e]^2 at z = 0
  double ground_sigma = 0.0;         // meters of z noise
  std::vector<ObjectSpec> objects;
  int frame_count = 11;
  double frame_period = 0.05;  // seconds
  std::size_t keyframe_index = 5;
  Eigen::Vector3d ego_velocity = Eigen::Vector3d::Zero();
  CameraModel camera;  // default_camera() unless the script overrides it
  double lidar_max_range = 120.0;
  std::int64_t lidar_points_per_frame = 4000;
  std::optional<std::pair<int, int>> superpixel_grid;  // tiles (nx, ny)
  std::uint64_t seed = 0;

  void validate() const;
};

// Pose of one object at time t (constant pose, constant velocity, or
// constant turn with the velocity vector rotating at yaw_rate).
RigidTransform object_pose(const ObjectSpec& object, double t);

// 640x480 pinhole with f = 500 px, principal point at the center, mounted
// looking along sensor +x (sensor y maps to image left, z to image up).
CameraModel default_camera();

struct GeneratedScene {
  FrameSequence frames;
  // Ground truth for the inter-frame points, in frame order with the
  // keyframe skipped: where each point's surface location sits at the
  // keyframe time, expressed in the keyframe sensor frame, and its class.
  Eigen::Matrix3Xd gt_keyframe_position;
  std::vector<std::uint8_t> gt_label;  // 0 static, 1 dynamic, 2 ground

  static constexpr std::uint8_t kLabelStatic = 0;
  static constexpr std::uint8_t kLabelDynamic = 1;
  static constexpr std::uint8_t kLabelGround = 2;
};

// Deterministic scene generation. Object surfaces are sampled once and
// carried rigidly through every frame (a noiseless scene stays exactly
// rigid across frames); ground is resampled per frame. Points beyond
// lidar_max_range from the sensor are dropped. No images are rendered; the
// camera and the optional tiled superpixel map stand in for them.
GeneratedScene generate(const SceneScript& script);

// Scene script JSON, documented in the README. Unknown fields are rejected.
SceneScript read_scene_script(const std::filesystem::path& path);

// Point-cloud augmentation parameters: a z rotation, then independent x/y
// sign flips, then removal of every point inside one axis-aligned cuboid
// (given in post-rotation/flip coordinates).
struct AugmentParams {
  double z_angle = 0.0;
  bool flip_x = false;
  bool flip_y = false;
  Eigen::Vector3d cuboid_center = Eigen::Vector3d::Zero();
  Eigen::Vector3d cuboid_size = Eigen::Vector3d::Zero();
};

// Draws augmentation parameters: z_angle uniform in [0, 2pi), each flip
// with probability 1/2, cuboid side lengths uniform in [2 m, 10 m] and
// center uniform over the bounding box of the rotated-and-flipped cloud.
// Draw order: angle, flip_x, flip_y, sizes (x, y, z), center (x, y, z).
AugmentParams draw_augment(const PointCloud& cloud, Rng& rng);

// Applies the three augmentation stages in order. Surviving points keep
// their source_index.
PointCloud apply_augment(const PointCloud& cloud, const AugmentParams& params);

inline PointCloud augment(const PointCloud& cloud, std::uint64_t seed) {
  Rng rng(seed);
  return apply_augment(cloud, draw_augment(cloud, rng));
}

}  // namespace lidist
