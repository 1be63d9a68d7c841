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
#include "lidist/dbscan.hpp"

namespace lidist {

struct TrackingParams {
  double c = 0.5;            // meters, moving threshold on consecutive L1 step
  int min_track_points = 5;  // centroid trusted only with this many members
};

// Per-timestamp centroid track of one cluster. Only timestamps with at least
// min_track_points members appear; `consecutive_l1` holds the L1 distance
// between each adjacent pair of kept centroids.
struct ClusterTrack {
  int cluster_id = -1;
  std::vector<double> timestamps;  // ascending
  std::vector<Eigen::Vector3d> centers;
  std::vector<std::int64_t> counts;
  std::vector<double> consecutive_l1;
  bool is_moving = false;
};

// Builds one track per cluster and flags a cluster moving iff any consecutive
// centroid displacement exceeds c (strict >) in L1. `timestamps` gives the
// frame time of each point of `cloud`. Clusters seen at fewer than two kept
// timestamps are never moving. Tracks are ordered by cluster id.
std::vector<ClusterTrack> track_moving(const PointCloud& cloud,
                                       const ClusterLabeling& labeling,
                                       const std::vector<double>& timestamps,
                                       const TrackingParams& params);

}  // namespace lidist
