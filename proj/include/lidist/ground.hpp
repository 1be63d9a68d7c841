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
#include <vector>

#include "lidist/core.hpp"
#include "lidist/rng.hpp"

namespace lidist {

struct GroundParams {
  double inlier_dist = 0.2;                   // meters
  double max_tilt_rad = 15.0 * kPi / 180.0;   // max normal angle from +z
  int iterations = 200;
  int min_points = 100;
};

enum class GroundStatus {
  kOk,
  kNoPlane,  // no near-horizontal plane found; all flags false
};

struct GroundResult {
  std::vector<std::uint8_t> is_ground;
  GroundStatus status = GroundStatus::kOk;
  // Plane in the input frame as n.dot(p) + d == 0 with |n| = 1, n.z() >= 0.
  // Only meaningful when status == kOk.
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double d = 0.0;
  std::int64_t inlier_count = 0;
};

// Single-plane RANSAC ground segmentation. The cloud's mean is subtracted
// before fitting; candidate planes are rejected unless their normal is within
// max_tilt_rad of +z; inliers within inlier_dist of the best plane are
// flagged ground. Throws std::invalid_argument when the cloud has fewer than
// min_points points.
GroundResult ground_removal(const PointCloud& cloud, const GroundParams& params,
                            Rng& rng);

inline GroundResult ground_removal(const PointCloud& cloud,
                                   const GroundParams& params,
                                   std::uint64_t seed) {
  Rng rng(seed);
  return ground_removal(cloud, params, rng);
}

}  // namespace lidist
