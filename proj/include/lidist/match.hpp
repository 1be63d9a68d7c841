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
#include <optional>
#include <vector>

#include "lidist/core.hpp"

namespace lidist {

// Points closer to the camera plane than this are treated as out of view,
// guarding the perspective division.
inline constexpr double kDepthMin = 1e-3;

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool in_view = false;
};

// Projects every point through the camera: extrinsics into the camera frame,
// then perspective division through the intrinsics. A point is in view when
// its camera-frame depth exceeds kDepthMin and (u, v) lands in
// [0, W) x [0, H). Out-of-view is a value, not an error.
std::vector<Projection> project(const CameraModel& camera,
                                const PointCloud& cloud);

struct Correspondence {
  std::int64_t point_index = 0;  // the point's source_index
  double u = 0.0;
  double v = 0.0;
  std::optional<std::uint32_t> superpixel;
};

// Point-pixel matches between one point frame and one image frame.
struct CorrespondenceSet {
  std::vector<Correspondence> entries;
  double frame_of_points = 0.0;
  double frame_of_image = 0.0;
};

// One entry per in-view point, in cloud order. With a superpixel map, the id
// is looked up at (floor(u), floor(v)) and unlabeled pixels are dropped.
// Throws std::invalid_argument when the map does not match the camera size.
CorrespondenceSet match_synced(const CameraModel& camera,
                               const PointCloud& cloud,
                               const SuperpixelMap* superpixels = nullptr);

// Same as match_synced, but each point is first mapped by its own transform.
// `cloud` must already be expressed in the keyframe sensor frame (ego motion
// compensated); `z` supplies one transform per point, identity for points
// that did not move. Throws std::invalid_argument on size mismatch.
CorrespondenceSet match_unsynced(const CameraModel& camera,
                                 const PointCloud& cloud,
                                 const std::vector<RigidTransform>& z,
                                 const SuperpixelMap* superpixels = nullptr,
                                 double image_timestamp = 0.0);

// For each LiDAR timestamp, the index of the image timestamp with minimal
// |dt|; exact ties break toward the earlier image. Both lists must be
// non-empty and sorted ascending.
std::vector<std::size_t> nearest_alignment(
    const std::vector<double>& lidar_timestamps,
    const std::vector<double>& image_timestamps);

}  // namespace lidist
