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

// Independent reference implementations the tests compare against. These are
// deliberately written the slow, obvious way.

#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "lidist/core.hpp"
#include "lidist/rng.hpp"

namespace oracles {

// Mean distance from a uniform point in the unit cube to its nearest lower
// corner, i.e. E[sqrt(u^2 + v^2 + w^2)] with u,v,w ~ U(0,1). Frozen from a
// 4e9-sample Monte-Carlo run; the mean quantization error of a uniform cloud
// under a cubic cell of side d is this constant times d.
inline constexpr double kCornerMeanConstant = 0.9605919564;

// O(n^2) DBSCAN with the library's conventions: neighborhoods include the
// point itself, clusters are connected components of the core-core graph,
// a border point joins the cluster of its smallest-index core neighbor, and
// labels are renumbered by smallest member index. Ground points stay -1.
inline std::vector<int> brute_dbscan(const Eigen::Matrix3Xd& pts,
                                     const std::vector<std::uint8_t>& is_ground,
                                     double eps, int min_pts) {
  const Eigen::Index n = pts.cols();
  const double eps2 = eps * eps;
  const auto close = [&](Eigen::Index a, Eigen::Index b) {
    return (pts.col(a) - pts.col(b)).squaredNorm() <= eps2;
  };

  std::vector<Eigen::Index> subset;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_ground[static_cast<std::size_t>(i)]) subset.push_back(i);
  }
  const std::size_t m = subset.size();

  std::vector<std::vector<std::size_t>> neigh(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (close(subset[a], subset[b])) neigh[a].push_back(b);
    }
  }
  std::vector<bool> core(m);
  for (std::size_t a = 0; a < m; ++a) {
    core[a] = static_cast<int>(neigh[a].size()) >= min_pts;
  }

  // Flood fill over core points only.
  std::vector<int> comp(m, -1);
  int next = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (!core[a] || comp[a] != -1) continue;
    comp[a] = next;
    std::queue<std::size_t> frontier;
    frontier.push(a);
    while (!frontier.empty()) {
      const std::size_t cur = frontier.front();
      frontier.pop();
      for (std::size_t nb : neigh[cur]) {
        if (core[nb] && comp[nb] == -1) {
          comp[nb] = next;
          frontier.push(nb);
        }
      }
    }
    ++next;
  }
  for (std::size_t a = 0; a < m; ++a) {
    if (core[a]) continue;
    for (std::size_t nb : neigh[a]) {  // ascending, so first core wins
      if (core[nb]) {
        comp[a] = comp[nb];
        break;
      }
    }
  }

  // Renumber by smallest member index.
  std::vector<int> remap(static_cast<std::size_t>(next), -1);
  int out_next = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (comp[a] >= 0 && remap[static_cast<std::size_t>(comp[a])] == -1) {
      remap[static_cast<std::size_t>(comp[a])] = out_next++;
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  for (std::size_t a = 0; a < m; ++a) {
    label[static_cast<std::size_t>(subset[a])] =
        comp[a] >= 0 ? remap[static_cast<std::size_t>(comp[a])] : -1;
  }
  return label;
}

// Direct evaluation of the contrastive objective in extended precision,
// without log-sum-exp stabilization.
inline double naive_contrastive_loss(const Eigen::MatrixXd& f,
                                     const Eigen::MatrixXd& g, double tau) {
  const Eigen::Index m = f.rows();
  long double total = 0.0L;
  for (Eigen::Index k = 0; k < m; ++k) {
    long double denom = 0.0L;
    for (Eigen::Index d = 0; d < m; ++d) {
      denom += std::exp(static_cast<long double>(f.row(d).dot(g.row(k))) / tau);
    }
    const long double pos =
        std::exp(static_cast<long double>(f.row(k).dot(g.row(k))) / tau);
    total += std::log(pos / denom);
  }
  return static_cast<double>(-total / m);
}

// Central finite difference of a scalar function over every entry of `x`.
template <typename F>
Eigen::MatrixXd finite_difference(const Eigen::MatrixXd& x, F&& fn,
                                  double h = 1e-5) {
  Eigen::MatrixXd grad(x.rows(), x.cols());
  Eigen::MatrixXd probe = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double saved = probe(r, c);
      probe(r, c) = saved + h;
      const double up = fn(probe);
      probe(r, c) = saved - h;
      const double down = fn(probe);
      probe(r, c) = saved;
      grad(r, c) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

inline Eigen::Matrix3d random_rotation(lidist::Rng& rng,
                                       double max_angle_rad = lidist::kPi) {
  Eigen::Vector3d axis;
  do {
    axis = {rng.normal(), rng.normal(), rng.normal()};
  } while (axis.norm() < 1e-6);
  axis.normalize();
  const double angle = rng.uniform(0.0, max_angle_rad);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

inline lidist::RigidTransform random_transform(lidist::Rng& rng,
                                               double max_angle_rad,
                                               double max_translation) {
  lidist::RigidTransform t;
  t.rotation = random_rotation(rng, max_angle_rad);
  for (int a = 0; a < 3; ++a) {
    t.translation[a] = rng.uniform(-max_translation, max_translation);
  }
  return t;
}

inline Eigen::Matrix3Xd random_points(lidist::Rng& rng, Eigen::Index n,
                                      double extent) {
  Eigen::Matrix3Xd pts(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) pts(a, i) = rng.uniform(-extent, extent);
  }
  return pts;
}

}  // namespace oracles
