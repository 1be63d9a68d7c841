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

#include "lidist/tracking.hpp"

#include <map>
#include <stdexcept>

namespace lidist {

std::vector<ClusterTrack> track_moving(const PointCloud& cloud,
                                       const ClusterLabeling& labeling,
                                       const std::vector<double>& timestamps,
                                       const TrackingParams& params) {
  const std::size_t n = static_cast<std::size_t>(cloud.size());
  if (labeling.label.size() != n || timestamps.size() != n) {
    throw std::invalid_argument("labeling/timestamp size mismatch");
  }
  if (!(params.c > 0.0)) {
    throw std::invalid_argument("moving threshold c must be > 0");
  }

  // (cluster, timestamp) -> accumulated sum and count. std::map keeps both
  // keys ordered, which fixes the output order.
  std::map<int, std::map<double, std::pair<Eigen::Vector3d, std::int64_t>>>
      acc;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labeling.label[i];
    if (label < 0) continue;
    auto& [sum, count] =
        acc[label]
            .try_emplace(timestamps[i], Eigen::Vector3d::Zero(), 0)
            .first->second;
    sum += cloud.points.col(static_cast<Eigen::Index>(i));
    ++count;
  }

  std::vector<ClusterTrack> out;
  out.reserve(acc.size());
  for (const auto& [cluster_id, per_time] : acc) {
    ClusterTrack track;
    track.cluster_id = cluster_id;
    for (const auto& [t, sc] : per_time) {
      const auto& [sum, count] = sc;
      if (count < params.min_track_points) continue;
      track.timestamps.push_back(t);
      track.centers.push_back(sum / static_cast<double>(count));
      track.counts.push_back(count);
    }
    for (std::size_t k = 1; k < track.centers.size(); ++k) {
      const double l1 =
          (track.centers[k] - track.centers[k - 1]).cwiseAbs().sum();
      track.consecutive_l1.push_back(l1);
      if (l1 > params.c) track.is_moving = true;
    }
    out.push_back(std::move(track));
  }
  return out;
}

}  // namespace lidist
