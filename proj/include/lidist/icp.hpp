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

#include <vector>

#include "lidist/core.hpp"

namespace lidist {

struct IcpParams {
  int max_iters = 50;
  double tol = 1e-6;           // stop when rmse improves by less than this
  double max_corr_dist = 2.0;  // meters, correspondence rejection radius
};

enum class IcpStatus {
  kOk,
  kDegenerate,  // too few pairs or rank-deficient geometry; init returned
};

struct IcpResult {
  RigidTransform transform;
  double rmse = 0.0;  // meters, of the returned transform's correspondences
  int iterations = 0;
  IcpStatus status = IcpStatus::kOk;
  std::vector<double> rmse_history;  // one entry per completed iteration
};

// Point-to-point ICP aligning `source` onto `target`: alternates nearest
// neighbor association (pairs beyond max_corr_dist rejected) with the
// closed-form least-squares rigid fit (SVD of the cross-covariance, with
// reflection correction). Stops when the per-iteration rmse improvement
// drops below tol or after max_iters, returning the best transform seen.
// Both clouds need at least 3 points (std::invalid_argument otherwise);
// degenerate geometry yields status kDegenerate with `init` returned.
IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const RigidTransform& init, const IcpParams& params = {});

// Closed-form least-squares rigid fit mapping each `src` column onto the
// matching `dst` column (Kabsch/Umeyama). Returns false when the
// cross-covariance is rank-deficient (fewer than two significant singular
// values) and the rotation is not determined.
bool fit_rigid(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst,
               RigidTransform* out);

}  // namespace lidist
