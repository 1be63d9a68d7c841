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

#include "lidist/loss.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace lidist {
namespace {

void check_pair(const FeatureMatrix& f, const FeatureMatrix& g, double tau) {
  if (f.rows() < 1 || f.cols() < 1) {
    throw std::invalid_argument("feature matrix must be at least 1x1");
  }
  if (f.rows() != g.rows() || f.cols() != g.cols()) {
    throw std::invalid_argument("feature matrices must share one shape");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!f.allFinite() || !g.allFinite()) {
    throw std::invalid_argument("features must be finite");
  }
}

// Column-stabilized softmax of S/tau over each column (the d axis).
Eigen::MatrixXd column_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Eigen::Index k = 0; k < p.cols(); ++k) {
    const double m = p.col(k).maxCoeff();
    p.col(k) = (p.col(k).array() - m).exp();
    p.col(k) /= p.col(k).sum();
  }
  return p;
}

}  // namespace

FeatureMatrix l2_normalize(const FeatureMatrix& fs) {
  FeatureMatrix out = fs;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm < 1e-12) {
      throw std::invalid_argument("cannot normalize a zero-norm feature row");
    }
    out.row(r) /= norm;
  }
  return out;
}

FeatureMatrix l2_normalize_backprop(const FeatureMatrix& raw,
                                    const FeatureMatrix& grad_normalized) {
  if (raw.rows() != grad_normalized.rows() ||
      raw.cols() != grad_normalized.cols()) {
    throw std::invalid_argument("gradient shape must match features");
  }
  FeatureMatrix out(raw.rows(), raw.cols());
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    const double norm = raw.row(r).norm();
    if (norm < 1e-12) {
      throw std::invalid_argument("cannot normalize a zero-norm feature row");
    }
    const Eigen::RowVectorXd y = raw.row(r) / norm;
    const Eigen::RowVectorXd gy = grad_normalized.row(r);
    out.row(r) = (gy - y * gy.dot(y)) / norm;
  }
  return out;
}

double contrastive_loss(const FeatureMatrix& f, const FeatureMatrix& g,
                        double tau) {
  check_pair(f, g, tau);
  const Eigen::Index m = f.rows();
  const Eigen::MatrixXd logits = (f * g.transpose()) / tau;  // (d, k)
  double total = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double mx = logits.col(k).maxCoeff();
    const double lse =
        mx + std::log((logits.col(k).array() - mx).exp().sum());
    total += lse - logits(k, k);
  }
  return total / static_cast<double>(m);
}

LossGrad contrastive_loss_grad(const FeatureMatrix& f, const FeatureMatrix& g,
                               double tau) {
  check_pair(f, g, tau);
  const Eigen::Index m = f.rows();
  const Eigen::MatrixXd logits = (f * g.transpose()) / tau;
  Eigen::MatrixXd ds = column_softmax(logits);  // dL/dS scaled below
  ds.diagonal().array() -= 1.0;
  ds /= static_cast<double>(m) * tau;
  LossGrad out;
  out.df = ds * g;
  out.dg = ds.transpose() * f;
  return out;
}

PooledPair superpixel_pool(const CorrespondenceSet& corr,
                           const FeatureMatrix& point_feats,
                           const FeatureMatrix& pixel_feats) {
  const Eigen::Index n = static_cast<Eigen::Index>(corr.entries.size());
  if (point_feats.rows() != n || pixel_feats.rows() != n) {
    throw std::invalid_argument(
        "feature rows must match correspondence entries");
  }
  if (point_feats.cols() != pixel_feats.cols()) {
    throw std::invalid_argument("feature matrices must share one dimension");
  }
  std::map<std::uint32_t, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& sp = corr.entries[static_cast<std::size_t>(i)].superpixel;
    if (sp) groups[*sp].push_back(i);
  }
  PooledPair out;
  const Eigen::Index k = static_cast<Eigen::Index>(groups.size());
  out.point_feats.setZero(k, point_feats.cols());
  out.pixel_feats.setZero(k, pixel_feats.cols());
  out.superpixel_ids.reserve(groups.size());
  Eigen::Index row = 0;
  for (const auto& [id, rows] : groups) {
    for (const Eigen::Index r : rows) {
      out.point_feats.row(row) += point_feats.row(r);
      out.pixel_feats.row(row) += pixel_feats.row(r);
    }
    out.point_feats.row(row) /= static_cast<double>(rows.size());
    out.pixel_feats.row(row) /= static_cast<double>(rows.size());
    out.superpixel_ids.push_back(id);
    ++row;
  }
  return out;
}

}  // namespace lidist
