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

#include "lidist/core.hpp"

namespace lidist {

enum class CoordSystem { kCartesian, kCylindrical };

// Voxel grid description. Cartesian sizes are (dx, dy, dz) in meters;
// cylindrical sizes are (drho meters, dphi radians, dz meters).
struct VoxelSpec {
  CoordSystem system = CoordSystem::kCartesian;
  Eigen::Vector3d sizes = Eigen::Vector3d::Constant(0.1);

  void validate() const;
};

// Result of voxel dedup. All per-cell arrays are parallel and ordered by
// ascending representative source_index. The anchor of a cell is its corner
// (key * size per axis), expressed in Cartesian coordinates.
struct QuantizedCloud {
  Eigen::Matrix<std::int64_t, 3, Eigen::Dynamic> voxel_keys;
  std::vector<std::int64_t> representative_index;
  Eigen::Matrix3Xd quantized_positions;
  std::int64_t dropped_count = 0;

  Eigen::Index size() const { return voxel_keys.cols(); }
};

// (rho, phi, z) with rho = sqrt(x^2+y^2) and phi = atan2(y, x) in [-pi, pi).
// rho == 0 yields phi = 0.
Eigen::Vector3d to_cylindrical(const Eigen::Vector3d& p);

Eigen::Vector3d cylindrical_to_cartesian(const Eigen::Vector3d& c);

// Integer cell key of one point: floor(coordinate / size) per axis in the
// spec's coordinate system. Throws std::invalid_argument when a coordinate is
// so large the key would overflow (corrupt input).
Eigen::Matrix<std::int64_t, 3, 1> voxel_key(const Eigen::Vector3d& p,
                                            const VoxelSpec& spec);

// Cartesian position of the quantization anchor (cell corner) of the cell
// containing p.
Eigen::Vector3d quantization_anchor(const Eigen::Vector3d& p,
                                    const VoxelSpec& spec);

// Deduplicates the cloud to one representative point per occupied cell, the
// member with the smallest source_index. Throws on an empty cloud.
QuantizedCloud quantize(const PointCloud& cloud, const VoxelSpec& spec);

struct ErrorStats {
  Eigen::VectorXd per_point;  // meters, one entry per input point
  double mean = 0.0;          // meters
};

// Euclidean distance (in Cartesian space) from every input point to its
// cell's anchor. Measured for all N input points, before dedup.
ErrorStats quantization_error(const PointCloud& cloud, const VoxelSpec& spec);

struct ProfileBin {
  double lo = 0.0;          // meters, bin lower edge (inclusive)
  double hi = 0.0;          // meters, bin upper edge (exclusive)
  std::int64_t count = 0;
  double mean_error = 0.0;  // meters
};

// Mean quantization error binned by each point's distance from the origin
// (sqrt(x^2+y^2+z^2)). Empty bins are omitted; bins are ascending.
std::vector<ProfileBin> error_vs_distance_profile(const PointCloud& cloud,
                                                  const VoxelSpec& spec,
                                                  double bin_width);

}  // namespace lidist
