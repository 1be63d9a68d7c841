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

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace lidist {

// Static k-d tree over the columns of a 3xN matrix. The matrix is referenced,
// not copied; it must outlive the tree. Query results are deterministic:
// nearest() breaks exact distance ties toward the smaller column index and
// radius() returns ascending indices, independent of build order.
class KdTree3 {
 public:
  explicit KdTree3(const Eigen::Matrix3Xd& points) : points_(&points) {
    const int n = static_cast<int>(points.cols());
    order_.resize(n);
    for (int i = 0; i < n; ++i) order_[i] = i;
    if (n > 0) root_ = build(0, n);
  }

  // Index of the nearest point to q, or -1 if the tree is empty. Writes the
  // squared distance when dist_sq_out is given.
  int nearest(const Eigen::Vector3d& q, double* dist_sq_out = nullptr) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    if (root_ >= 0) search_nearest(root_, q, &best, &best_d2);
    if (dist_sq_out != nullptr) *dist_sq_out = best_d2;
    return best;
  }

  // Indices of all points with distance <= r from q, ascending.
  std::vector<int> radius(const Eigen::Vector3d& q, double r) const {
    std::vector<int> out;
    if (root_ >= 0) search_radius(root_, q, r * r, &out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    int begin = 0;
    int end = 0;
  };

  double coord(int idx, int axis) const { return (*points_)(axis, idx); }

  int build(int begin, int end) {
    Node node;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
      nodes_[id].begin = begin;
      nodes_[id].end = end;
      return id;
    }
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(
        std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    for (int i = begin; i < end; ++i) {
      const Eigen::Vector3d p = points_->col(order_[i]);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [this, axis](int a, int b) {
                       const double ca = coord(a, axis);
                       const double cb = coord(b, axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    nodes_[id].axis = axis;
    nodes_[id].split = coord(order_[mid], axis);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search_nearest(int id, const Eigen::Vector3d& q, int* best,
                      double* best_d2) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        const double d2 = (points_->col(idx) - q).squaredNorm();
        if (d2 < *best_d2 || (d2 == *best_d2 && idx < *best)) {
          *best_d2 = d2;
          *best = idx;
        }
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    search_nearest(near, q, best, best_d2);
    if (delta * delta <= *best_d2) search_nearest(far, q, best, best_d2);
  }

  void search_radius(int id, const Eigen::Vector3d& q, double r2,
                     std::vector<int>* out) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if ((points_->col(idx) - q).squaredNorm() <= r2) out->push_back(idx);
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    search_radius(near, q, r2, out);
    if (delta * delta <= r2) search_radius(far, q, r2, out);
  }

  const Eigen::Matrix3Xd* points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace lidist
