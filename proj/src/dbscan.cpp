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

#include "lidist/dbscan.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lidist/kdtree.hpp"

namespace lidist {
namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

}  // namespace

ClusterLabeling cluster(const PointCloud& cloud,
                        const std::vector<std::uint8_t>& is_ground,
                        const DbscanParams& params) {
  if (!(params.eps > 0.0) || params.min_pts < 1) {
    throw std::invalid_argument("eps must be > 0 and min_pts >= 1");
  }
  const Eigen::Index n = cloud.size();
  if (is_ground.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("ground mask size mismatch");
  }

  ClusterLabeling out;
  out.label.assign(static_cast<std::size_t>(n), -1);
  out.is_ground = is_ground;

  // Compact the non-ground points; `subset[j]` maps back to the cloud column.
  std::vector<int> subset;
  subset.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_ground[static_cast<std::size_t>(i)]) {
      subset.push_back(static_cast<int>(i));
    }
  }
  const int m = static_cast<int>(subset.size());
  if (m == 0) return out;

  Eigen::Matrix3Xd pts(3, m);
  for (int j = 0; j < m; ++j) pts.col(j) = cloud.points.col(subset[j]);
  const KdTree3 tree(pts);

  std::vector<std::vector<int>> neighbors(m);
  std::vector<std::uint8_t> core(m, 0);
  for (int j = 0; j < m; ++j) {
    neighbors[j] = tree.radius(pts.col(j), params.eps);
    core[j] = neighbors[j].size() >= static_cast<std::size_t>(params.min_pts);
  }

  // Clusters are connected components of the core points.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (int j = 0; j < m; ++j) {
    if (!core[j]) continue;
    for (int k : neighbors[j]) {
      if (core[k]) unite(parent, j, k);
    }
  }

  // Provisional label = component root for cores; border points take the
  // cluster of their smallest-index core neighbor (neighbor lists ascend).
  std::vector<int> provisional(m, -1);
  for (int j = 0; j < m; ++j) {
    if (core[j]) {
      provisional[j] = find_root(parent, j);
    } else {
      for (int k : neighbors[j]) {
        if (core[k]) {
          provisional[j] = find_root(parent, k);
          break;
        }
      }
    }
  }

  // Renumber components 0..C-1 by smallest subset index, which is also the
  // smallest original index because subset preserves order.
  std::vector<int> compact(m, -1);
  int next = 0;
  for (int j = 0; j < m; ++j) {
    const int p = provisional[j];
    if (p < 0) continue;
    if (compact[p] < 0) compact[p] = next++;
    out.label[static_cast<std::size_t>(subset[j])] = compact[p];
  }
  out.cluster_count = next;
  return out;
}

}  // namespace lidist
