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

#include "lidist/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lidist {
namespace {

FlowEval eval_split(FlowSplit split, const std::vector<double>& epe,
                    const std::vector<double>& rel,
                    const FlowThresholds& th) {
  FlowEval out;
  out.split = split;
  out.count = static_cast<std::int64_t>(epe.size());
  std::int64_t acc_s = 0;
  std::int64_t acc_r = 0;
  std::int64_t outliers = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < epe.size(); ++i) {
    sum += epe[i];
    if (epe[i] < th.strict_epe || rel[i] < th.strict_rel) ++acc_s;
    if (epe[i] < th.relax_epe || rel[i] < th.relax_rel) ++acc_r;
    if (epe[i] > th.outlier_epe && rel[i] > th.outlier_rel) ++outliers;
  }
  const double n = static_cast<double>(epe.size());
  out.epe_avg = sum / n;
  std::vector<double> sorted = epe;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.epe_med = sorted.size() % 2 == 1
                    ? sorted[mid]
                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  out.acc_s = acc_s / n;
  out.acc_r = acc_r / n;
  out.outlier_rate = outliers / n;
  return out;
}

}  // namespace

void FlowThresholds::validate() const {
  const double values[] = {strict_epe, strict_rel, relax_epe,
                           relax_rel,  outlier_epe, outlier_rel};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("flow thresholds must be positive");
    }
  }
}

FlowReport evaluate_flow(const Eigen::Matrix3Xd& predicted,
                         const Eigen::Matrix3Xd& gt,
                         const Eigen::Matrix3Xd& start,
                         const std::vector<std::uint8_t>& labels,
                         const FlowThresholds& thresholds) {
  thresholds.validate();
  const Eigen::Index n = predicted.cols();
  if (gt.cols() != n || start.cols() != n ||
      labels.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(
        "predicted, ground truth, start, and labels must have equal length");
  }

  std::vector<double> epe_static, rel_static, epe_dyn, rel_dyn;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint8_t label = labels[static_cast<std::size_t>(i)];
    if (label > 2) {
      throw std::invalid_argument("labels must be 0 (static), 1 (dynamic), or 2 (ground)");
    }
    const double epe = (predicted.col(i) - gt.col(i)).norm();
    const double mag = (gt.col(i) - start.col(i)).norm();
    double rel;
    if (mag > 0.0) {
      rel = epe / mag;
    } else {
      rel = epe == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (label == 1) {
      epe_dyn.push_back(epe);
      rel_dyn.push_back(rel);
    } else {
      epe_static.push_back(epe);
      rel_static.push_back(rel);
    }
  }

  FlowReport report;
  if (!epe_static.empty()) {
    report.static_part = eval_split(FlowSplit::kStaticPart, epe_static,
                                    rel_static, thresholds);
  }
  if (!epe_dyn.empty()) {
    report.dynamic_foreground = eval_split(FlowSplit::kDynamicForeground,
                                           epe_dyn, rel_dyn, thresholds);
  }
  return report;
}

}  // namespace lidist
