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
#include <filesystem>
#include <string>
#include <vector>

#include "lidist/core.hpp"

namespace lidist {

// Filesystem-level failure: missing file, unreadable stream, unwritable
// destination. Malformed but readable content throws std::invalid_argument
// instead; the CLI maps the two onto different exit codes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point cloud files. Binary layout: magic "LDPC", u32 version (=1), u64 point
// count, then 3 little-endian float64 (x, y, z meters) per point. The ".csv"
// extension selects instead a text file with header `x,y,z`. source_index is
// assigned 0..N-1 on read.
PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

// Per-point rigid transforms. Layout: magic "LDZT", u32 version (=1), u64
// count, then 12 little-endian float64 per transform (row-major 3x4 [R|t]).
// Rotations are validated on read.
std::vector<RigidTransform> read_transforms(const std::filesystem::path& path);
void write_transforms(const std::filesystem::path& path,
                      const std::vector<RigidTransform>& transforms);

// Ground-truth keyframe endpoints, one 3-vector per point. Layout: magic
// "LDFL", u32 version (=1), u64 count, then 3 little-endian float64 each.
Eigen::Matrix3Xd read_endpoints(const std::filesystem::path& path);
void write_endpoints(const std::filesystem::path& path,
                     const Eigen::Matrix3Xd& endpoints);

// Per-point class labels (0 static, 1 dynamic, 2 ground). Layout: magic
// "LDLB", u32 version (=1), u64 count, then one u8 per point.
std::vector<std::uint8_t> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path,
                  const std::vector<std::uint8_t>& labels);

// Superpixel label maps. ".pgm" selects binary PGM (P5) with maxval 65535,
// where sample 65535 means unlabeled; any other extension selects raw
// row-major little-endian u32 samples (0xffffffff unlabeled) described by a
// JSON sidecar at `<path>.json` with fields `width` and `height`.
SuperpixelMap read_superpixels(const std::filesystem::path& path);
void write_superpixels(const std::filesystem::path& path,
                       const SuperpixelMap& map);

// Scene manifest JSON:
//   {
//     "frames": [{"cloud_path": ..., "timestamp": ...,
//                 "pose": [16 row-major float64]}, ...],
//     "keyframe_index": ...,
//     "camera": {"intrinsics": [9 row-major], "extrinsics": [16 row-major],
//                "width": ..., "height": ...},
//     "superpixels": optional path
//   }
// Relative paths resolve against the manifest's directory.
FrameSequence read_scene(const std::filesystem::path& manifest_path);
void write_scene(const std::filesystem::path& manifest_path,
                 const FrameSequence& scene,
                 const std::string& cloud_prefix = "frame_");

}  // namespace lidist
