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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace lidist {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Rigid SE(3) transform acting as p -> rotation * p + translation.
// Rotation is kept as a plain 3x3 matrix; poses arrive as 4x4 matrices in
// manifests and are re-validated on construction via from_matrix.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  // Builds from a 4x4 homogeneous matrix. Throws std::invalid_argument if the
  // upper-left block is not orthonormal with det +1 (tolerance 1e-9) or the
  // last row is not (0,0,0,1).
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  RigidTransform inverse() const {
    RigidTransform out;
    out.rotation = rotation.transpose();
    out.translation = -(out.rotation * translation);
    return out;
  }

  Eigen::Vector3d operator()(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  // Exact (bitwise) identity check, used to keep never-touched transforms
  // distinguishable from numerically-near-identity fits.
  bool is_identity() const {
    return rotation == Eigen::Matrix3d::Identity() &&
           translation == Eigen::Vector3d::Zero();
  }
};

inline void validate_rotation(const Eigen::Matrix3d& r, double tol = 1e-9) {
  const double ortho =
      (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho <= tol) || !(std::abs(r.determinant() - 1.0) <= tol)) {
    throw std::invalid_argument("rotation is not orthonormal with det +1");
  }
}

inline RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("homogeneous matrix last row is not (0,0,0,1)");
  }
  RigidTransform out;
  out.rotation = m.topLeftCorner<3, 3>();
  out.translation = m.topRightCorner<3, 1>();
  validate_rotation(out.rotation);
  return out;
}

// Applies b, then a: compose(a, b)(p) == a(b(p)).
inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

inline RigidTransform rotation_z(double angle_rad) {
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(angle_rad, Eigen::Vector3d::UnitZ())
                     .toRotationMatrix();
  return out;
}

inline RigidTransform translation(const Eigen::Vector3d& t) {
  RigidTransform out;
  out.translation = t;
  return out;
}

// A point cloud at one timestamp. Points are the columns of `points`, in
// meters. `source_index` carries each point's original index and stays stable
// through filtering and dedup; values must be unique.
struct PointCloud {
  Eigen::Matrix3Xd points;
  std::vector<std::int64_t> source_index;
  double timestamp = 0.0;

  Eigen::Index size() const { return points.cols(); }

  // Checks the structural invariants: |points| == |source_index|, indices
  // unique, all coordinates finite. Throws std::invalid_argument.
  void validate() const {
    if (static_cast<std::size_t>(points.cols()) != source_index.size()) {
      throw std::invalid_argument("point/source_index size mismatch");
    }
    if (!points.allFinite()) {
      throw std::invalid_argument("cloud contains non-finite coordinates");
    }
    std::vector<std::int64_t> sorted = source_index;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("source_index values are not unique");
    }
  }
};

// Wraps a bare point matrix as a cloud with source_index 0..N-1.
inline PointCloud make_cloud(Eigen::Matrix3Xd points, double timestamp = 0.0) {
  PointCloud out;
  out.points = std::move(points);
  out.source_index.resize(out.points.cols());
  for (Eigen::Index i = 0; i < out.points.cols(); ++i) {
    out.source_index[static_cast<std::size_t>(i)] = i;
  }
  out.timestamp = timestamp;
  return out;
}

inline PointCloud apply(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out = cloud;
  out.points = (t.rotation * cloud.points).colwise() + t.translation;
  return out;
}

inline PointCloud sensor_to_global(const PointCloud& frame,
                                   const RigidTransform& pose) {
  return apply(pose, frame);
}

inline PointCloud global_to_sensor(const PointCloud& frame,
                                   const RigidTransform& pose) {
  return apply(pose.inverse(), frame);
}

// Pinhole camera at the keyframe. `extrinsics` maps LiDAR sensor coordinates
// into camera coordinates (camera looks along +z, x right, y down).
struct CameraModel {
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  RigidTransform extrinsics;
  int image_width = 0;
  int image_height = 0;

  void validate() const {
    if (image_width < 1 || image_height < 1) {
      throw std::invalid_argument("image dimensions must be >= 1");
    }
    if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0)) {
      throw std::invalid_argument("focal lengths must be positive");
    }
    const double cx = intrinsics(0, 2);
    const double cy = intrinsics(1, 2);
    if (!(cx >= 0.0 && cx < image_width && cy >= 0.0 && cy < image_height)) {
      throw std::invalid_argument("principal point outside image bounds");
    }
  }
};

// Precomputed superpixel label map, row-major `height` x `width`. Label
// kUnlabeled marks pixels outside every superpixel; other ids must form a
// contiguous range 0..K-1.
struct SuperpixelMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;

  static constexpr std::uint32_t kUnlabeled =
      std::numeric_limits<std::uint32_t>::max();

  std::uint32_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }

  // Number of distinct superpixel ids. Throws std::invalid_argument when the
  // grid size is inconsistent or ids are not contiguous from zero.
  std::uint32_t validate() const {
    if (width < 1 || height < 1 ||
        labels.size() != static_cast<std::size_t>(width) * height) {
      throw std::invalid_argument("superpixel map dimensions inconsistent");
    }
    std::uint32_t max_id = 0;
    std::vector<bool> seen;
    for (std::uint32_t id : labels) {
      if (id == kUnlabeled) continue;
      if (id >= seen.size()) seen.resize(id + 1, false);
      seen[id] = true;
      max_id = std::max(max_id, id);
    }
    if (seen.empty()) return 0;
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw std::invalid_argument("superpixel ids are not contiguous from 0");
    }
    return max_id + 1;
  }
};

struct Frame {
  PointCloud cloud;
  RigidTransform pose;  // sensor -> global
};

// A window of consecutive frames around one synced keyframe.
struct FrameSequence {
  std::vector<Frame> frames;
  std::size_t keyframe_index = 0;
  CameraModel camera;
  std::optional<SuperpixelMap> superpixels;

  const Frame& keyframe() const { return frames.at(keyframe_index); }

  void validate() const {
    if (frames.empty()) throw std::invalid_argument("frame sequence is empty");
    if (keyframe_index >= frames.size()) {
      throw std::invalid_argument("keyframe_index out of range");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!(frames[i].cloud.timestamp > frames[i - 1].cloud.timestamp)) {
        throw std::invalid_argument("frames are not temporally ordered");
      }
    }
    camera.validate();
    if (superpixels) {
      superpixels->validate();
      if (superpixels->width != camera.image_width ||
          superpixels->height != camera.image_height) {
        throw std::invalid_argument("superpixel map does not match camera size");
      }
    }
  }
};

}  // namespace lidist
