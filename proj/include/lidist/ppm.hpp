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
#include <string>
#include <vector>

#include "lidist/core.hpp"
#include "lidist/dbscan.hpp"
#include "lidist/ground.hpp"
#include "lidist/icp.hpp"
#include "lidist/tracking.hpp"

namespace lidist {

struct PpmParams {
  GroundParams ground;
  DbscanParams dbscan;
  TrackingParams tracking;
  IcpParams icp;
  std::uint64_t seed = 0;
  int threads = 1;  // parallelism for the per-cluster registrations
};

// All frames concatenated in the global frame. cloud.source_index is a
// running 0..N-1; frame_index/original_index/timestamp record each point's
// provenance (frame position in the sequence, source_index within that
// frame, frame time).
struct AggregateCloud {
  PointCloud cloud;
  std::vector<int> frame_index;
  std::vector<std::int64_t> original_index;
  std::vector<double> timestamp;
};

AggregateCloud aggregate(const FrameSequence& frames);

// One cluster-slice registration performed by mine(), for diagnostics.
struct Registration {
  int cluster_id = -1;
  double timestamp = 0.0;       // slice being registered
  double target_timestamp = 0.0;
  std::int64_t points = 0;
  double rmse = 0.0;
  int iterations = 0;
  IcpStatus status = IcpStatus::kOk;
  bool chained = false;
};

struct PpmResult {
  AggregateCloud aggregate;
  // Per aggregate point, expressed in the keyframe sensor frame. Ground and
  // static points carry exact identity; points sharing (cluster, timestamp)
  // share one value.
  std::vector<RigidTransform> z;
  ClusterLabeling labeling;
  std::vector<ClusterTrack> tracks;
  GroundStatus ground_status = GroundStatus::kOk;
  double ground_fraction = 0.0;
  int moving_cluster_count = 0;
  std::vector<Registration> registrations;
  std::vector<std::string> warnings;
};

// The full mining pipeline: aggregate the frames in global coordinates,
// remove ground, cluster, flag moving clusters by centroid tracking, then
// register every moving cluster's per-timestamp slice onto its
// keyframe-timestamp slice with ICP (init = centroid-difference translation)
// and record the result as that slice's transform. When a moving cluster has
// no keyframe slice, its slices chain hop-by-hop toward the kept timestamp
// nearest the keyframe, which itself stays at identity with a warning.
// Fitted transforms are conjugated by the keyframe pose into the keyframe
// sensor frame; untouched points keep exact identity. Deterministic given
// the seed, independent of `threads`.
PpmResult mine(const FrameSequence& frames, const PpmParams& params);

// The z entries of the inter-frame points only (aggregate order with the
// keyframe's points removed), matching the on-disk transform file layout.
std::vector<RigidTransform> interframe_transforms(const PpmResult& result,
                                                  std::size_t keyframe_index);

// Draws one inter-frame index (position in frames.frames) with probability
// proportional to |timestamp - keyframe timestamp|. Falls back to uniform
// when all offsets are zero. Deterministic given the seed.
std::size_t sample_interframe(const FrameSequence& frames, std::uint64_t seed);

}  // namespace lidist
