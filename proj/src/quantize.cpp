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

#include "lidist/quantize.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace lidist {
namespace {

// Keys stay well inside int64 so downstream arithmetic (neighbor offsets,
// hashing) cannot overflow.
constexpr double kMaxKeyMagnitude = 4.6e18;

struct KeyHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

Eigen::Vector3d grid_coords(const Eigen::Vector3d& p, const VoxelSpec& spec) {
  return spec.system == CoordSystem::kCartesian ? p : to_cylindrical(p);
}

}  // namespace

void VoxelSpec::validate() const {
  if (!(sizes.minCoeff() > 0.0)) {
    throw std::invalid_argument("voxel sizes must be strictly positive");
  }
  if (system == CoordSystem::kCylindrical && !(sizes[1] < 2.0 * kPi)) {
    throw std::invalid_argument("azimuthal voxel size must be < 2*pi");
  }
}

Eigen::Vector3d to_cylindrical(const Eigen::Vector3d& p) {
  const double rho = std::hypot(p.x(), p.y());
  const double phi = rho == 0.0 ? 0.0 : std::atan2(p.y(), p.x());
  return {rho, phi, p.z()};
}

Eigen::Vector3d cylindrical_to_cartesian(const Eigen::Vector3d& c) {
  return {c.x() * std::cos(c.y()), c.x() * std::sin(c.y()), c.z()};
}

Eigen::Matrix<std::int64_t, 3, 1> voxel_key(const Eigen::Vector3d& p,
                                            const VoxelSpec& spec) {
  const Eigen::Vector3d c = grid_coords(p, spec);
  Eigen::Matrix<std::int64_t, 3, 1> key;
  for (int a = 0; a < 3; ++a) {
    const double q = std::floor(c[a] / spec.sizes[a]);
    if (!(std::abs(q) < kMaxKeyMagnitude)) {
      throw std::invalid_argument("coordinate overflows voxel key");
    }
    key[a] = static_cast<std::int64_t>(q);
  }
  return key;
}

Eigen::Vector3d quantization_anchor(const Eigen::Vector3d& p,
                                    const VoxelSpec& spec) {
  const Eigen::Matrix<std::int64_t, 3, 1> key = voxel_key(p, spec);
  const Eigen::Vector3d corner =
      key.cast<double>().cwiseProduct(spec.sizes);
  return spec.system == CoordSystem::kCartesian
             ? corner
             : cylindrical_to_cartesian(corner);
}

QuantizedCloud quantize(const PointCloud& cloud, const VoxelSpec& spec) {
  spec.validate();
  if (cloud.size() == 0) throw std::invalid_argument("empty cloud");

  const Eigen::Index n = cloud.size();
  std::unordered_map<std::array<std::int64_t, 3>, Eigen::Index, KeyHash> cells;
  cells.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = voxel_key(cloud.points.col(i), spec);
    const std::array<std::int64_t, 3> key = {k[0], k[1], k[2]};
    auto [it, inserted] = cells.try_emplace(key, i);
    if (!inserted &&
        cloud.source_index[static_cast<std::size_t>(i)] <
            cloud.source_index[static_cast<std::size_t>(it->second)]) {
      it->second = i;
    }
  }

  // Deterministic output order: ascending representative source_index.
  std::map<std::int64_t, std::pair<std::array<std::int64_t, 3>, Eigen::Index>>
      ordered;
  for (const auto& [key, col] : cells) {
    ordered.emplace(cloud.source_index[static_cast<std::size_t>(col)],
                    std::make_pair(key, col));
  }

  QuantizedCloud out;
  const Eigen::Index retained = static_cast<Eigen::Index>(ordered.size());
  out.voxel_keys.resize(3, retained);
  out.quantized_positions.resize(3, retained);
  out.representative_index.reserve(static_cast<std::size_t>(retained));
  Eigen::Index j = 0;
  for (const auto& [src, cell] : ordered) {
    const auto& [key, col] = cell;
    out.voxel_keys.col(j) =
        Eigen::Matrix<std::int64_t, 3, 1>(key[0], key[1], key[2]);
    out.quantized_positions.col(j) =
        quantization_anchor(cloud.points.col(col), spec);
    out.representative_index.push_back(src);
    ++j;
  }
  out.dropped_count = static_cast<std::int64_t>(n - retained);
  return out;
}

ErrorStats quantization_error(const PointCloud& cloud, const VoxelSpec& spec) {
  spec.validate();
  if (cloud.size() == 0) throw std::invalid_argument("empty cloud");
  ErrorStats out;
  out.per_point.resize(cloud.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d p = cloud.points.col(i);
    const double err = (p - quantization_anchor(p, spec)).norm();
    out.per_point[i] = err;
    sum += err;
  }
  out.mean = sum / static_cast<double>(cloud.size());
  return out;
}

std::vector<ProfileBin> error_vs_distance_profile(const PointCloud& cloud,
                                                  const VoxelSpec& spec,
                                                  double bin_width) {
  if (!(bin_width > 0.0)) {
    throw std::invalid_argument("bin_width must be positive");
  }
  const ErrorStats stats = quantization_error(cloud, spec);
  std::map<std::int64_t, std::pair<std::int64_t, double>> bins;  // count, sum
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const double dist = cloud.points.col(i).norm();
    const std::int64_t b =
        static_cast<std::int64_t>(std::floor(dist / bin_width));
    auto& [count, sum] = bins[b];
    ++count;
    sum += stats.per_point[i];
  }
  std::vector<ProfileBin> out;
  out.reserve(bins.size());
  for (const auto& [b, acc] : bins) {
    ProfileBin bin;
    bin.lo = static_cast<double>(b) * bin_width;
    bin.hi = bin.lo + bin_width;
    bin.count = acc.first;
    bin.mean_error = acc.second / static_cast<double>(acc.first);
    out.push_back(bin);
  }
  return out;
}

}  // namespace lidist
