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

#include "lidist/icp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lidist/kdtree.hpp"

namespace lidist {

bool fit_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst,
               RigidTransform* out) {
  const Eigen::Vector3d src_mean = src.rowwise().mean();
  const Eigen::Vector3d dst_mean = dst.rowwise().mean();
  const Eigen::Matrix3d cov = (dst.colwise() - dst_mean) *
                              (src.colwise() - src_mean).transpose();
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  // The rotation is determined only when at least two singular values are
  // significant (collinear correspondences leave a free axis).
  if (sigma(1) <= 1e-12 * std::max(sigma(0), 1e-300)) return false;
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  out->rotation = r;
  out->translation = dst_mean - r * src_mean;
  return true;
}

IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const RigidTransform& init, const IcpParams& params) {
  if (source.size() < 3 || target.size() < 3) {
    throw std::invalid_argument("icp needs at least 3 points per cloud");
  }

  const KdTree3 tree(target.points);
  const double max_d2 = params.max_corr_dist * params.max_corr_dist;

  IcpResult out;
  out.transform = init;
  out.rmse = std::numeric_limits<double>::quiet_NaN();

  RigidTransform current = init;
  double best_rmse = std::numeric_limits<double>::infinity();
  double prev_rmse = std::numeric_limits<double>::infinity();
  bool fitted = false;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    // Associate under the current estimate.
    const Eigen::Matrix3Xd moved =
        (current.rotation * source.points).colwise() + current.translation;
    std::vector<Eigen::Index> src_idx;
    std::vector<int> dst_idx;
    src_idx.reserve(static_cast<std::size_t>(source.size()));
    dst_idx.reserve(static_cast<std::size_t>(source.size()));
    for (Eigen::Index i = 0; i < moved.cols(); ++i) {
      double d2 = 0.0;
      const int j = tree.nearest(moved.col(i), &d2);
      if (j >= 0 && d2 <= max_d2) {
        src_idx.push_back(i);
        dst_idx.push_back(j);
      }
    }
    const Eigen::Index pairs = static_cast<Eigen::Index>(src_idx.size());
    if (pairs < 3) {
      if (!fitted) out.status = IcpStatus::kDegenerate;
      return out;
    }

    Eigen::Matrix3Xd src(3, pairs);
    Eigen::Matrix3Xd dst(3, pairs);
    for (Eigen::Index k = 0; k < pairs; ++k) {
      src.col(k) = source.points.col(src_idx[static_cast<std::size_t>(k)]);
      dst.col(k) = target.points.col(dst_idx[static_cast<std::size_t>(k)]);
    }
    RigidTransform next;
    if (!fit_rigid(src, dst, &next)) {
      if (!fitted) out.status = IcpStatus::kDegenerate;
      return out;
    }
    fitted = true;
    current = next;

    const double rmse = std::sqrt(
        (((next.rotation * src).colwise() + next.translation) - dst)
            .colwise()
            .squaredNorm()
            .mean());
    out.rmse_history.push_back(rmse);
    out.iterations = iter + 1;
    if (rmse < best_rmse) {
      best_rmse = rmse;
      out.transform = next;
      out.rmse = rmse;
    }
    if (prev_rmse - rmse < params.tol) break;
    prev_rmse = rmse;
  }
  return out;
}

}  // namespace lidist
