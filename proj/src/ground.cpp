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

#include "lidist/ground.hpp"

#include <cmath>
#include <stdexcept>

namespace lidist {

GroundResult ground_removal(const PointCloud& cloud, const GroundParams& params,
                            Rng& rng) {
  const Eigen::Index n = cloud.size();
  if (n < params.min_points) {
    throw std::invalid_argument("too few points for ground removal");
  }

  const Eigen::Vector3d mean = cloud.points.rowwise().mean();
  const Eigen::Matrix3Xd centered = cloud.points.colwise() - mean;
  const double min_cos = std::cos(params.max_tilt_rad);

  bool found = false;
  Eigen::Vector3d best_normal = Eigen::Vector3d::UnitZ();
  double best_offset = 0.0;  // plane: best_normal.dot(q) == best_offset
  Eigen::Index best_count = 0;

  for (int iter = 0; iter < params.iterations; ++iter) {
    const Eigen::Index ia = rng.uniform_int(n);
    const Eigen::Index ib = rng.uniform_int(n);
    const Eigen::Index ic = rng.uniform_int(n);
    if (ia == ib || ia == ic || ib == ic) continue;
    const Eigen::Vector3d a = centered.col(ia);
    Eigen::Vector3d normal =
        (centered.col(ib) - a).cross(centered.col(ic) - a);
    const double len = normal.norm();
    if (len < 1e-12) continue;  // degenerate (collinear) sample
    normal /= len;
    if (normal.z() < 0.0) normal = -normal;
    if (normal.z() < min_cos) continue;  // too steep for ground

    const double offset = normal.dot(a);
    const Eigen::Index count =
        (((normal.transpose() * centered).array() - offset).abs() <=
         params.inlier_dist)
            .count();
    if (!found || count > best_count) {
      found = true;
      best_normal = normal;
      best_offset = offset;
      best_count = count;
    }
  }

  GroundResult out;
  out.is_ground.assign(static_cast<std::size_t>(n), 0);
  if (!found) {
    out.status = GroundStatus::kNoPlane;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dist = std::abs(best_normal.dot(centered.col(i)) - best_offset);
    if (dist <= params.inlier_dist) {
      out.is_ground[static_cast<std::size_t>(i)] = 1;
      ++out.inlier_count;
    }
  }
  out.normal = best_normal;
  // Back to the input frame: n.dot(p - mean) == offset.
  out.d = -(best_offset + best_normal.dot(mean));
  return out;
}

}  // namespace lidist
