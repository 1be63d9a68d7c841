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

#include "lidist/match.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lidist {
namespace {

Projection project_one(const CameraModel& camera, const Eigen::Vector3d& p) {
  Projection out;
  const Eigen::Vector3d q = camera.extrinsics(p);
  out.depth = q.z();
  if (!(out.depth > kDepthMin)) return out;
  const Eigen::Vector3d uvw = camera.intrinsics * q;
  out.u = uvw.x() / uvw.z();
  out.v = uvw.y() / uvw.z();
  out.in_view = out.u >= 0.0 && out.u < camera.image_width && out.v >= 0.0 &&
                out.v < camera.image_height;
  return out;
}

void check_superpixels(const CameraModel& camera, const SuperpixelMap* sp) {
  if (sp != nullptr && (sp->width != camera.image_width ||
                        sp->height != camera.image_height)) {
    throw std::invalid_argument("superpixel map does not match camera size");
  }
}

void append_entry(const SuperpixelMap* sp, const Projection& prj,
                  std::int64_t source_index,
                  std::vector<Correspondence>* entries) {
  if (!prj.in_view) return;
  Correspondence entry;
  entry.point_index = source_index;
  entry.u = prj.u;
  entry.v = prj.v;
  if (sp != nullptr) {
    const int px = static_cast<int>(std::floor(prj.u));
    const int py = static_cast<int>(std::floor(prj.v));
    const std::uint32_t id = sp->at(px, py);
    if (id == SuperpixelMap::kUnlabeled) return;
    entry.superpixel = id;
  }
  entries->push_back(entry);
}

}  // namespace

std::vector<Projection> project(const CameraModel& camera,
                                const PointCloud& cloud) {
  camera.validate();
  std::vector<Projection> out(static_cast<std::size_t>(cloud.size()));
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    out[static_cast<std::size_t>(i)] = project_one(camera, cloud.points.col(i));
  }
  return out;
}

CorrespondenceSet match_synced(const CameraModel& camera,
                               const PointCloud& cloud,
                               const SuperpixelMap* superpixels) {
  camera.validate();
  check_superpixels(camera, superpixels);
  CorrespondenceSet out;
  out.frame_of_points = cloud.timestamp;
  out.frame_of_image = cloud.timestamp;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    append_entry(superpixels, project_one(camera, cloud.points.col(i)),
                 cloud.source_index[static_cast<std::size_t>(i)],
                 &out.entries);
  }
  return out;
}

CorrespondenceSet match_unsynced(const CameraModel& camera,
                                 const PointCloud& cloud,
                                 const std::vector<RigidTransform>& z,
                                 const SuperpixelMap* superpixels,
                                 double image_timestamp) {
  camera.validate();
  check_superpixels(camera, superpixels);
  if (z.size() != static_cast<std::size_t>(cloud.size())) {
    throw std::invalid_argument("one transform per point required");
  }
  CorrespondenceSet out;
  out.frame_of_points = cloud.timestamp;
  out.frame_of_image = image_timestamp;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    const Eigen::Vector3d p = z[s](cloud.points.col(i));
    append_entry(superpixels, project_one(camera, p), cloud.source_index[s],
                 &out.entries);
  }
  return out;
}

std::vector<std::size_t> nearest_alignment(
    const std::vector<double>& lidar_timestamps,
    const std::vector<double>& image_timestamps) {
  if (lidar_timestamps.empty() || image_timestamps.empty()) {
    throw std::invalid_argument("timestamp lists must be non-empty");
  }
  if (!std::is_sorted(lidar_timestamps.begin(), lidar_timestamps.end()) ||
      !std::is_sorted(image_timestamps.begin(), image_timestamps.end())) {
    throw std::invalid_argument("timestamp lists must be sorted");
  }
  std::vector<std::size_t> out;
  out.reserve(lidar_timestamps.size());
  for (const double t : lidar_timestamps) {
    const auto it = std::lower_bound(image_timestamps.begin(),
                                     image_timestamps.end(), t);
    std::size_t best = it == image_timestamps.end()
                           ? image_timestamps.size() - 1
                           : static_cast<std::size_t>(
                                 it - image_timestamps.begin());
    if (it != image_timestamps.begin()) {
      const std::size_t before =
          static_cast<std::size_t>(it - image_timestamps.begin()) - 1;
      // <= keeps the earlier image on an exact tie.
      if (std::abs(image_timestamps[before] - t) <=
          std::abs(image_timestamps[best] - t)) {
        best = before;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace lidist
