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
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace lidist {

// Endpoint-error thresholds for the accuracy and outlier fractions. A point
// counts as accurate when either its absolute endpoint error or its error
// relative to the ground-truth flow magnitude is below the bound; it counts
// as an outlier only when both exceed the outlier bound, which keeps the
// relaxed-accurate and outlier sets disjoint.
struct FlowThresholds {
  double strict_epe = 0.05;
  double strict_rel = 0.05;
  double relax_epe = 0.1;
  double relax_rel = 0.1;
  double outlier_epe = 0.3;
  double outlier_rel = 0.3;

  void validate() const;
};

enum class FlowSplit { kStaticPart, kDynamicForeground };

// Metrics over one label split. Fractions are in [0, 1]; errors in meters.
struct FlowEval {
  FlowSplit split = FlowSplit::kStaticPart;
  double epe_avg = 0.0;
  double epe_med = 0.0;
  double acc_s = 0.0;
  double acc_r = 0.0;
  double outlier_rate = 0.0;
  std::int64_t count = 0;
};

struct FlowReport {
  std::optional<FlowEval> static_part;        // labels 0 (static) and 2 (ground)
  std::optional<FlowEval> dynamic_foreground; // label 1
};

// Compares predicted against ground-truth endpoints, split by per-point
// labels (0 static, 1 dynamic, 2 ground). `start` holds the untransformed
// point positions; the ground-truth flow for the relative error is
// `gt - start`. A zero-magnitude flow has relative error 0 when the endpoint
// error is also zero and infinity otherwise. Splits with no points are
// reported as absent.
FlowReport evaluate_flow(const Eigen::Matrix3Xd& predicted,
                         const Eigen::Matrix3Xd& gt,
                         const Eigen::Matrix3Xd& start,
                         const std::vector<std::uint8_t>& labels,
                         const FlowThresholds& thresholds = {});

}  // namespace lidist
