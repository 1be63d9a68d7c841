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

#include "lidist/ppm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <stdexcept>

#include "lidist/rng.hpp"

namespace lidist {
namespace {

PointCloud slice_cloud(const PointCloud& cloud, const std::vector<int>& cols) {
  PointCloud out;
  out.points.resize(3, static_cast<Eigen::Index>(cols.size()));
  out.source_index.reserve(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.points.col(static_cast<Eigen::Index>(k)) = cloud.points.col(cols[k]);
    out.source_index.push_back(cloud.source_index[cols[k]]);
  }
  out.timestamp = cloud.timestamp;
  return out;
}

Eigen::Vector3d centroid(const PointCloud& cloud) {
  return cloud.points.rowwise().mean();
}

// One slice-to-slice ICP job. Jobs are independent; composition into final
// transforms happens after all jobs complete, so running them concurrently
// cannot change the result.
struct Job {
  int cluster_id = -1;
  double source_ts = 0.0;
  double target_ts = 0.0;
  const std::vector<int>* source_cols = nullptr;
  const std::vector<int>* target_cols = nullptr;
  bool chained = false;
};

}  // namespace

AggregateCloud aggregate(const FrameSequence& frames) {
  frames.validate();
  Eigen::Index total = 0;
  for (const Frame& f : frames.frames) total += f.cloud.size();

  AggregateCloud out;
  out.cloud.points.resize(3, total);
  out.cloud.source_index.reserve(static_cast<std::size_t>(total));
  out.cloud.timestamp = frames.keyframe().cloud.timestamp;
  out.frame_index.reserve(static_cast<std::size_t>(total));
  out.original_index.reserve(static_cast<std::size_t>(total));
  out.timestamp.reserve(static_cast<std::size_t>(total));

  Eigen::Index offset = 0;
  for (std::size_t fi = 0; fi < frames.frames.size(); ++fi) {
    const Frame& frame = frames.frames[fi];
    const PointCloud global = sensor_to_global(frame.cloud, frame.pose);
    out.cloud.points.middleCols(offset, global.size()) = global.points;
    for (Eigen::Index i = 0; i < global.size(); ++i) {
      out.cloud.source_index.push_back(offset + i);
      out.frame_index.push_back(static_cast<int>(fi));
      out.original_index.push_back(
          frame.cloud.source_index[static_cast<std::size_t>(i)]);
      out.timestamp.push_back(frame.cloud.timestamp);
    }
    offset += global.size();
  }
  return out;
}

PpmResult mine(const FrameSequence& frames, const PpmParams& params) {
  frames.validate();
  PpmResult out;
  out.aggregate = aggregate(frames);
  const PointCloud& cloud = out.aggregate.cloud;
  const std::size_t n = static_cast<std::size_t>(cloud.size());

  Rng rng(params.seed);
  const GroundResult ground = ground_removal(cloud, params.ground, rng);
  out.ground_status = ground.status;
  if (ground.status == GroundStatus::kNoPlane) {
    out.warnings.push_back("ground removal found no acceptable plane");
  }
  out.ground_fraction =
      n == 0 ? 0.0 : static_cast<double>(ground.inlier_count) / n;

  out.labeling = cluster(cloud, ground.is_ground, params.dbscan);
  out.tracks =
      track_moving(cloud, out.labeling, out.aggregate.timestamp,
                   params.tracking);
  for (const ClusterTrack& t : out.tracks) {
    if (t.is_moving) ++out.moving_cluster_count;
  }

  out.z.assign(n, RigidTransform::identity());

  const double key_ts = frames.keyframe().cloud.timestamp;
  const RigidTransform key_pose = frames.keyframe().pose;
  const RigidTransform key_pose_inv = key_pose.inverse();

  // Member columns per (cluster, timestamp), ordered keys.
  std::map<std::pair<int, double>, std::vector<int>> members;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = out.labeling.label[i];
    if (label < 0) continue;
    members[{label, out.aggregate.timestamp[i]}].push_back(
        static_cast<int>(i));
  }

  // Plan registrations. For each moving cluster: every kept timestamp other
  // than the anchor gets one job. With the keyframe present the anchor is
  // the keyframe slice and jobs target it directly; otherwise the anchor is
  // the kept timestamp nearest the keyframe and jobs hop to the adjacent
  // kept timestamp toward it, composed after the ICP runs.
  std::vector<Job> jobs;
  struct ChainPlan {
    int cluster_id;
    std::vector<double> kept;  // ascending
    std::size_t anchor_pos;
  };
  std::vector<ChainPlan> chains;

  for (const ClusterTrack& track : out.tracks) {
    if (!track.is_moving) continue;
    const std::vector<double>& kept = track.timestamps;
    const auto key_it = std::find(kept.begin(), kept.end(), key_ts);
    if (key_it != kept.end()) {
      const std::vector<int>& target =
          members.at({track.cluster_id, key_ts});
      for (const double ts : kept) {
        if (ts == key_ts) continue;
        Job job;
        job.cluster_id = track.cluster_id;
        job.source_ts = ts;
        job.target_ts = key_ts;
        job.source_cols = &members.at({track.cluster_id, ts});
        job.target_cols = &target;
        jobs.push_back(job);
      }
      continue;
    }

    // Fallback: anchor at the kept timestamp nearest the keyframe (earlier
    // one on a tie) and chain adjacent slices toward it.
    std::size_t anchor = 0;
    for (std::size_t k = 1; k < kept.size(); ++k) {
      if (std::abs(kept[k] - key_ts) < std::abs(kept[anchor] - key_ts)) {
        anchor = k;
      }
    }
    out.warnings.push_back(
        "cluster " + std::to_string(track.cluster_id) +
        " has no keyframe slice; anchored at t=" + std::to_string(kept[anchor]));
    chains.push_back({track.cluster_id, kept, anchor});
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (k == anchor) continue;
      const std::size_t next = k < anchor ? k + 1 : k - 1;
      Job job;
      job.cluster_id = track.cluster_id;
      job.source_ts = kept[k];
      job.target_ts = kept[next];
      job.source_cols = &members.at({track.cluster_id, kept[k]});
      job.target_cols = &members.at({track.cluster_id, kept[next]});
      job.chained = true;
      jobs.push_back(job);
    }
  }

  // Run the ICP jobs, optionally in parallel. Results land in job order, so
  // the outcome does not depend on the thread count.
  std::vector<IcpResult> results(jobs.size());
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Job& job = jobs[k];
      const PointCloud src = slice_cloud(cloud, *job.source_cols);
      const PointCloud tgt = slice_cloud(cloud, *job.target_cols);
      const RigidTransform init = translation(centroid(tgt) - centroid(src));
      results[k] = icp_register(src, tgt, init, params.icp);
    }
  };
  const int threads = std::max(1, params.threads);
  if (threads == 1 || jobs.size() <= 1) {
    run_range(0, jobs.size());
  } else {
    const std::size_t chunk =
        (jobs.size() + static_cast<std::size_t>(threads) - 1) /
        static_cast<std::size_t>(threads);
    std::vector<std::future<void>> futures;
    for (std::size_t begin = 0; begin < jobs.size(); begin += chunk) {
      const std::size_t end = std::min(begin + chunk, jobs.size());
      futures.push_back(
          std::async(std::launch::async, run_range, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  // Global-frame transform per (cluster, timestamp) slice.
  std::map<std::pair<int, double>, RigidTransform> slice_z;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Job& job = jobs[k];
    const IcpResult& res = results[k];
    if (res.status == IcpStatus::kDegenerate) {
      out.warnings.push_back("degenerate registration for cluster " +
                             std::to_string(job.cluster_id) + " at t=" +
                             std::to_string(job.source_ts));
    }
    if (!job.chained) {
      slice_z[{job.cluster_id, job.source_ts}] = res.transform;
    }
    Registration reg;
    reg.cluster_id = job.cluster_id;
    reg.timestamp = job.source_ts;
    reg.target_timestamp = job.target_ts;
    reg.points = static_cast<std::int64_t>(job.source_cols->size());
    reg.rmse = res.rmse;
    reg.iterations = res.iterations;
    reg.status = res.status;
    reg.chained = job.chained;
    out.registrations.push_back(reg);
  }

  // Compose the chained hops outward from each anchor.
  std::map<std::pair<int, double>, RigidTransform> hop;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (jobs[k].chained) {
      hop[{jobs[k].cluster_id, jobs[k].source_ts}] = results[k].transform;
    }
  }
  for (const ChainPlan& chain : chains) {
    // Walking from the anchor outward guarantees the inner neighbor's
    // transform is already final.
    for (std::size_t step = 1; step < chain.kept.size(); ++step) {
      for (const int dir : {-1, +1}) {
        const std::ptrdiff_t pos =
            static_cast<std::ptrdiff_t>(chain.anchor_pos) +
            dir * static_cast<std::ptrdiff_t>(step);
        if (pos < 0 ||
            pos >= static_cast<std::ptrdiff_t>(chain.kept.size())) {
          continue;
        }
        const double ts = chain.kept[static_cast<std::size_t>(pos)];
        const double inner_ts =
            chain.kept[static_cast<std::size_t>(pos - dir)];
        const RigidTransform& own = hop.at({chain.cluster_id, ts});
        const auto inner = slice_z.find({chain.cluster_id, inner_ts});
        slice_z[{chain.cluster_id, ts}] =
            inner == slice_z.end() ? own : compose(inner->second, own);
      }
    }
  }

  // Write the slice transforms into z, conjugated into the keyframe sensor
  // frame. Only fitted transforms are conjugated; untouched points keep the
  // exact identity.
  for (const auto& [key, z_global] : slice_z) {
    const RigidTransform z_sensor =
        compose(key_pose_inv, compose(z_global, key_pose));
    for (const int col : members.at(key)) {
      out.z[static_cast<std::size_t>(col)] = z_sensor;
    }
  }
  return out;
}

std::vector<RigidTransform> interframe_transforms(
    const PpmResult& result, std::size_t keyframe_index) {
  std::vector<RigidTransform> out;
  out.reserve(result.z.size());
  for (std::size_t i = 0; i < result.z.size(); ++i) {
    if (result.aggregate.frame_index[i] !=
        static_cast<int>(keyframe_index)) {
      out.push_back(result.z[i]);
    }
  }
  return out;
}

std::size_t sample_interframe(const FrameSequence& frames,
                              std::uint64_t seed) {
  frames.validate();
  const double key_ts = frames.keyframe().cloud.timestamp;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t i = 0; i < frames.frames.size(); ++i) {
    if (i == frames.keyframe_index) continue;
    indices.push_back(i);
    const double w = std::abs(frames.frames[i].cloud.timestamp - key_ts);
    weights.push_back(w);
    total += w;
  }
  if (indices.empty()) {
    throw std::invalid_argument("no inter-frames to sample");
  }
  Rng rng(seed);
  if (total <= 0.0) {
    return indices[static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(indices.size())))];
  }
  const double u = rng.uniform01() * total;
  double cum = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    cum += weights[k];
    if (u < cum) return indices[k];
  }
  return indices.back();
}

}  // namespace lidist
