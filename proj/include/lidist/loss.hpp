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

#include <Eigen/Dense>

#include "lidist/match.hpp"

namespace lidist {

// Feature matrices are M x D with one feature vector per row: row k of the
// point-side matrix pairs with row k of the pixel-side matrix.
using FeatureMatrix = Eigen::MatrixXd;

// Scales every row to unit Euclidean norm. Throws std::invalid_argument on a
// row with norm below 1e-12.
FeatureMatrix l2_normalize(const FeatureMatrix& fs);

// Backpropagates a gradient taken with respect to l2_normalize(raw) onto
// `raw` (the per-row normalization Jacobian). Composable with the loss
// gradients below, which are with respect to the normalized rows.
FeatureMatrix l2_normalize_backprop(const FeatureMatrix& raw,
                                    const FeatureMatrix& grad_normalized);

// Softmax-based contrastive distillation loss over paired rows:
//   L = -(1/M) sum_k log( exp(<f_k, g_k>/tau) / sum_d exp(<f_d, g_k>/tau) )
// with the negatives d running over the point-side rows f_d for each fixed
// pixel-side row g_k. Evaluated with a per-column stabilized log-sum-exp.
// Rows are expected unit-norm; tau must be > 0.
double contrastive_loss(const FeatureMatrix& f, const FeatureMatrix& g,
                        double tau);

struct LossGrad {
  FeatureMatrix df;  // dL/df, M x D
  FeatureMatrix dg;  // dL/dg, M x D
};

// Analytic gradient of contrastive_loss with respect to the (already
// normalized) rows of f and g.
LossGrad contrastive_loss_grad(const FeatureMatrix& f, const FeatureMatrix& g,
                               double tau);

// Paired features pooled per superpixel id, ids ascending.
struct PooledPair {
  std::vector<std::uint32_t> superpixel_ids;
  FeatureMatrix point_feats;
  FeatureMatrix pixel_feats;
};

// Arithmetic mean of the member point features and member pixel features per
// superpixel. Row i of each input corresponds to corr.entries[i]; entries
// without a superpixel id are skipped. One output pair per superpixel with
// at least one correspondence.
PooledPair superpixel_pool(const CorrespondenceSet& corr,
                           const FeatureMatrix& point_feats,
                           const FeatureMatrix& pixel_feats);

}  // namespace lidist
