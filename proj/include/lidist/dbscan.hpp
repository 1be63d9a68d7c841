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

namespace lidist {

struct DbscanParams {
  double eps = 0.5;  // meters
  int min_pts = 10;
};

// Per-point cluster assignment over a cloud. Ground points and noise carry
// label -1; cluster ids are contiguous 0..C-1, numbered by each cluster's
// smallest member index so labels are stable under input permutation.
struct ClusterLabeling {
  std::vector<int> label;
  std::vector<std::uint8_t> is_ground;
  int cluster_count = 0;
};

// Euclidean DBSCAN over the non-ground points. Conventions: a point's eps
// neighborhood includes the point itself; core points with >= min_pts
// neighbors form clusters as connected components (mutual eps reachability);
// a non-core point within eps of a core point joins the cluster of its
// smallest-index core neighbor; everything else is noise.
ClusterLabeling cluster(const PointCloud& cloud,
                        const std::vector<std::uint8_t>& is_ground,
                        const DbscanParams& params);

}  // namespace lidist
