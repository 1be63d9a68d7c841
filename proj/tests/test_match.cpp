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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "lidist/match.hpp"
#include "lidist/quantize.hpp"
#include "lidist/rng.hpp"
#include "oracles.hpp"

using namespace lidist;

namespace {

CameraModel identity_camera() {
  CameraModel cam;
  cam.intrinsics << 500, 0, 320, 0, 500, 240, 0, 0, 1;
  cam.image_width = 640;
  cam.image_height = 480;
  return cam;
}

// Points spread through the viewing volume of identity_camera.
PointCloud frustum_cloud(std::uint64_t seed, Eigen::Index n) {
  Rng rng(seed);
  Eigen::Matrix3Xd pts(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = rng.uniform(2.0, 40.0);
    pts.col(i) = Eigen::Vector3d(rng.uniform(-0.25, 0.25) * z,
                                 rng.uniform(-0.2, 0.2) * z, z);
  }
  return make_cloud(std::move(pts));
}

}  // namespace

TEST_CASE("optical-axis point projects to the principal point") {
  const CameraModel cam = identity_camera();
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(0, 0, 10);
  const auto proj = project(cam, make_cloud(pts));
  REQUIRE(proj.size() == 1);
  CHECK(proj[0].in_view);
  CHECK(proj[0].u == doctest::Approx(320.0));
  CHECK(proj[0].v == doctest::Approx(240.0));
  CHECK(proj[0].depth == doctest::Approx(10.0));
}

TEST_CASE("points behind the camera are out of view") {
  const CameraModel cam = identity_camera();
  Eigen::Matrix3Xd pts(3, 2);
  pts.col(0) = Eigen::Vector3d(0, 0, -1);
  pts.col(1) = Eigen::Vector3d(0, 0, 1e-4);  // inside the near guard
  const auto proj = project(cam, make_cloud(pts));
  CHECK(!proj[0].in_view);
  CHECK(!proj[1].in_view);
}

TEST_CASE("projection matches the pinhole formula") {
  const CameraModel cam = identity_camera();
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(1, 0.5, 10);
  const auto proj = project(cam, make_cloud(pts));
  CHECK(proj[0].u == doctest::Approx(370.0));
  CHECK(proj[0].v == doctest::Approx(265.0));
}

TEST_CASE("extrinsics are applied before the intrinsic projection") {
  CameraModel cam = identity_camera();
  cam.extrinsics = translation({0.0, 0.0, 5.0});
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(0, 0, 5);  // lands at camera depth 10
  const auto proj = project(cam, make_cloud(pts));
  CHECK(proj[0].depth == doctest::Approx(10.0));
  CHECK(proj[0].u == doctest::Approx(320.0));
}

TEST_CASE("match_synced keeps exactly the in-view points") {
  const CameraModel cam = identity_camera();
  Eigen::Matrix3Xd behind(3, 5);
  for (int i = 0; i < 5; ++i) {
    behind.col(i) = Eigen::Vector3d(0.1 * i, 0.2, -2.0 - i);
  }
  CHECK(match_synced(cam, make_cloud(behind)).entries.empty());

  const PointCloud cloud = frustum_cloud(31, 1000);
  const CorrespondenceSet corr = match_synced(cam, cloud);
  const auto proj = project(cam, cloud);
  std::size_t in_view = 0;
  for (const auto& p : proj) in_view += p.in_view ? 1 : 0;
  REQUIRE(corr.entries.size() == in_view);
  std::size_t e = 0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    if (!proj[static_cast<std::size_t>(i)].in_view) continue;
    CHECK(corr.entries[e].point_index == i);
    CHECK(std::abs(corr.entries[e].u - proj[static_cast<std::size_t>(i)].u) <
          1e-9);
    CHECK(std::abs(corr.entries[e].v - proj[static_cast<std::size_t>(i)].v) <
          1e-9);
    ++e;
  }
}

TEST_CASE("uniform superpixel map tags every entry with id zero") {
  const CameraModel cam = identity_camera();
  SuperpixelMap sp;
  sp.width = cam.image_width;
  sp.height = cam.image_height;
  sp.labels.assign(static_cast<std::size_t>(sp.width) * sp.height, 0);
  const CorrespondenceSet corr =
      match_synced(cam, frustum_cloud(32, 200), &sp);
  REQUIRE(!corr.entries.empty());
  for (const auto& e : corr.entries) {
    REQUIRE(e.superpixel.has_value());
    CHECK(*e.superpixel == 0);
  }
}

TEST_CASE("sentinel superpixels drop their entries") {
  const CameraModel cam = identity_camera();
  SuperpixelMap sp;
  sp.width = cam.image_width;
  sp.height = cam.image_height;
  sp.labels.assign(static_cast<std::size_t>(sp.width) * sp.height,
                   SuperpixelMap::kUnlabeled);
  CHECK(match_synced(cam, frustum_cloud(33, 200), &sp).entries.empty());
}

TEST_CASE("superpixel dimension mismatch is a configuration error") {
  const CameraModel cam = identity_camera();
  SuperpixelMap sp;
  sp.width = 320;
  sp.height = 480;
  sp.labels.assign(320 * 480, 0);
  CHECK_THROWS_AS(match_synced(cam, frustum_cloud(34, 10), &sp),
                  std::invalid_argument);
}

TEST_CASE("all-identity transforms reduce to the synced match exactly") {
  const CameraModel cam = identity_camera();
  const PointCloud cloud = frustum_cloud(35, 500);
  const std::vector<RigidTransform> z(static_cast<std::size_t>(cloud.size()));
  const CorrespondenceSet synced = match_synced(cam, cloud);
  const CorrespondenceSet unsynced = match_unsynced(cam, cloud, z);
  REQUIRE(unsynced.entries.size() == synced.entries.size());
  for (std::size_t i = 0; i < synced.entries.size(); ++i) {
    CHECK(unsynced.entries[i].point_index == synced.entries[i].point_index);
    CHECK(unsynced.entries[i].u == synced.entries[i].u);  // bitwise
    CHECK(unsynced.entries[i].v == synced.entries[i].v);
  }
}

TEST_CASE("a compensating transform undoes a known displacement") {
  const CameraModel cam = identity_camera();
  const Eigen::Vector3d delta(0.8, -0.3, 0.5);
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(1.0, 0.4, 12.0) + delta;
  const std::vector<RigidTransform> z = {translation(-delta)};
  const CorrespondenceSet moved = match_unsynced(cam, make_cloud(pts), z);

  Eigen::Matrix3Xd ref(3, 1);
  ref.col(0) = Eigen::Vector3d(1.0, 0.4, 12.0);
  const CorrespondenceSet still = match_synced(cam, make_cloud(ref));
  REQUIRE(moved.entries.size() == 1);
  REQUIRE(still.entries.size() == 1);
  CHECK(std::abs(moved.entries[0].u - still.entries[0].u) < 1e-9);
  CHECK(std::abs(moved.entries[0].v - still.entries[0].v) < 1e-9);
}

TEST_CASE("a transform that moves a point behind the camera drops it") {
  const CameraModel cam = identity_camera();
  Eigen::Matrix3Xd pts(3, 1);
  pts.col(0) = Eigen::Vector3d(0, 0, 10);
  const std::vector<RigidTransform> z = {translation({0, 0, -20})};
  CHECK(match_unsynced(cam, make_cloud(pts), z).entries.empty());
}

TEST_CASE("transform count must equal point count") {
  const CameraModel cam = identity_camera();
  const PointCloud cloud = frustum_cloud(36, 10);
  const std::vector<RigidTransform> z(9);
  CHECK_THROWS_AS(match_unsynced(cam, cloud, z), std::invalid_argument);
}

TEST_CASE("nearest alignment picks the closest image, earlier on ties") {
  CHECK(nearest_alignment({0.10}, {0.0, 0.083, 0.166}) ==
        std::vector<std::size_t>{1});
  CHECK(nearest_alignment({0.5}, {0.0, 1.0}) ==
        std::vector<std::size_t>{0});  // equidistant, earlier wins

  // 20 Hz lidar against 12 Hz images over one second.
  std::vector<double> lidar, images;
  for (int i = 0; i < 20; ++i) lidar.push_back(i / 20.0);
  for (int i = 0; i < 12; ++i) images.push_back(i / 12.0);
  const auto got = nearest_alignment(lidar, images);
  REQUIRE(got.size() == lidar.size());
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < images.size(); ++j) {
      if (std::abs(images[j] - lidar[i]) <
          std::abs(images[best] - lidar[i])) {
        best = j;
      }
    }
    CHECK(got[i] == best);
  }
}

TEST_CASE("nearest alignment validates its inputs") {
  CHECK_THROWS_AS(nearest_alignment({}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(nearest_alignment({0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(nearest_alignment({0.0}, {1.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("every correspondence lies inside the image bounds") {
  const CameraModel cam = identity_camera();
  Rng rng(37);
  const PointCloud cloud = make_cloud(oracles::random_points(rng, 2000, 30.0));
  for (const auto& e : match_synced(cam, cloud).entries) {
    CHECK(e.u >= 0.0);
    CHECK(e.u < cam.image_width);
    CHECK(e.v >= 0.0);
    CHECK(e.v < cam.image_height);
  }
}

TEST_CASE("matching after dedup yields a subset of matching before") {
  const CameraModel cam = identity_camera();
  const PointCloud cloud = frustum_cloud(38, 3000);
  VoxelSpec spec;
  spec.sizes = Eigen::Vector3d::Constant(0.5);
  const QuantizedCloud q = quantize(cloud, spec);
  REQUIRE(q.size() < cloud.size());

  PointCloud deduped;
  deduped.points.resize(3, q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    deduped.points.col(i) =
        cloud.points.col(static_cast<Eigen::Index>(q.representative_index[i]));
    deduped.source_index.push_back(q.representative_index[i]);
  }

  std::set<std::int64_t> full;
  for (const auto& e : match_synced(cam, cloud).entries) {
    full.insert(e.point_index);
  }
  for (const auto& e : match_synced(cam, deduped).entries) {
    CHECK(full.count(e.point_index) == 1);
  }
}
