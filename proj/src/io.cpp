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

#include "lidist/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts need swaps");

namespace lidist {
namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void read_exact(std::istream& in, void* dst, std::size_t bytes,
                const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw std::invalid_argument(std::string("truncated ") + what);
  }
}

template <typename T>
T read_scalar(std::istream& in, const char* what) {
  T v;
  read_exact(in, &v, sizeof(T), what);
  return v;
}

template <typename T>
void write_scalar(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

// Validates magic + version and returns the element count. A zero-byte file
// reports "empty" rather than "truncated".
std::uint64_t read_header(std::istream& in, const char* magic,
                          const char* what) {
  char m[4];
  in.read(m, 4);
  if (in.gcount() == 0) {
    throw std::invalid_argument(std::string("empty ") + what);
  }
  if (in.gcount() != 4 || std::memcmp(m, magic, 4) != 0) {
    throw std::invalid_argument(std::string("bad magic in ") + what);
  }
  const auto version = read_scalar<std::uint32_t>(in, what);
  if (version != 1) {
    throw std::invalid_argument(std::string("unsupported version in ") + what);
  }
  return read_scalar<std::uint64_t>(in, what);
}

void write_header(std::ostream& out, const char* magic, std::uint64_t count) {
  out.write(magic, 4);
  write_scalar<std::uint32_t>(out, 1);
  write_scalar<std::uint64_t>(out, count);
}

Eigen::Matrix3Xd read_vec3_block(std::istream& in, std::uint64_t count,
                                 const char* what) {
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(count));
  if (count > 0) {
    read_exact(in, out.data(), count * 3 * sizeof(double), what);
  }
  return out;
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty cloud");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z") {
    throw std::invalid_argument("cloud CSV must start with header x,y,z");
  }
  std::vector<Eigen::Vector3d> pts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Eigen::Vector3d p;
    char comma1 = 0;
    char comma2 = 0;
    std::istringstream row(line);
    if (!(row >> p.x() >> comma1 >> p.y() >> comma2 >> p.z()) ||
        comma1 != ',' || comma2 != ',') {
      throw std::invalid_argument("malformed cloud CSV at line " +
                                  std::to_string(line_no));
    }
    pts.push_back(p);
  }
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = pts[i];
  }
  return make_cloud(std::move(m));
}

void write_cloud_csv(const std::filesystem::path& path,
                     const PointCloud& cloud) {
  std::ofstream out = open_out(path, false);
  out << "x,y,z\n";
  char buf[96];
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                  cloud.points(0, i), cloud.points(1, i), cloud.points(2, i));
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, false);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument("malformed JSON: " + path.string());
  }
  return j;
}

Eigen::Matrix3d matrix3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 9) {
    throw std::invalid_argument(std::string(what) + " must be 9 numbers");
  }
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  }
  return m;
}

RigidTransform transform_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 16) {
    throw std::invalid_argument(std::string(what) + " must be 16 numbers");
  }
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = j[4 * r + c].get<double>();
  }
  return RigidTransform::from_matrix(m);
}

json transform_to(const RigidTransform& t) {
  const Eigen::Matrix4d m = t.matrix();
  json j = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) j.push_back(m(r, c));
  }
  return j;
}

SuperpixelMap read_superpixels_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (!in || magic != "P5" || maxval != 65535 || width < 1 || height < 1) {
    throw std::invalid_argument("superpixel PGM must be P5 with maxval 65535");
  }
  in.get();  // single whitespace byte before the raster
  SuperpixelMap map;
  map.width = width;
  map.height = height;
  map.labels.resize(static_cast<std::size_t>(width) * height);
  std::vector<unsigned char> raw(map.labels.size() * 2);
  read_exact(in, raw.data(), raw.size(), "superpixel PGM");
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    // PGM 16-bit samples are big-endian.
    const std::uint32_t v =
        (static_cast<std::uint32_t>(raw[2 * i]) << 8) | raw[2 * i + 1];
    map.labels[i] = v == 65535 ? SuperpixelMap::kUnlabeled : v;
  }
  return map;
}

void write_superpixels_pgm(const std::filesystem::path& path,
                           const SuperpixelMap& map) {
  std::ofstream out = open_out(path, true);
  out << "P5\n" << map.width << " " << map.height << "\n65535\n";
  std::vector<unsigned char> raw(map.labels.size() * 2);
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    std::uint32_t v = map.labels[i];
    if (v == SuperpixelMap::kUnlabeled) {
      v = 65535;
    } else if (v >= 65535) {
      throw std::invalid_argument("superpixel id too large for 16-bit PGM");
    }
    raw[2 * i] = static_cast<unsigned char>(v >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

SuperpixelMap read_superpixels_raw(const std::filesystem::path& path) {
  const json sidecar = load_json(path.string() + ".json");
  SuperpixelMap map;
  map.width = sidecar.at("width").get<int>();
  map.height = sidecar.at("height").get<int>();
  if (map.width < 1 || map.height < 1) {
    throw std::invalid_argument("superpixel sidecar dimensions invalid");
  }
  std::ifstream in = open_in(path, true);
  map.labels.resize(static_cast<std::size_t>(map.width) * map.height);
  read_exact(in, map.labels.data(), map.labels.size() * sizeof(std::uint32_t),
             "superpixel raw map");
  return map;
}

void write_superpixels_raw(const std::filesystem::path& path,
                           const SuperpixelMap& map) {
  {
    std::ofstream side = open_out(path.string() + ".json", false);
    side << json{{"width", map.width}, {"height", map.height}}.dump(2) << "\n";
    if (!side) throw IoError("write failed: " + path.string() + ".json");
  }
  std::ofstream out = open_out(path, true);
  out.write(reinterpret_cast<const char*>(map.labels.data()),
            static_cast<std::streamsize>(map.labels.size() *
                                         sizeof(std::uint32_t)));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

PointCloud read_cloud(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    PointCloud cloud = read_cloud_csv(path);
    cloud.validate();
    return cloud;
  }
  std::ifstream in = open_in(path, true);
  const std::uint64_t count = read_header(in, "LDPC", "cloud file");
  PointCloud cloud = make_cloud(read_vec3_block(in, count, "cloud file"));
  cloud.validate();
  return cloud;
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  if (path.extension() == ".csv") {
    write_cloud_csv(path, cloud);
    return;
  }
  std::ofstream out = open_out(path, true);
  write_header(out, "LDPC", static_cast<std::uint64_t>(cloud.size()));
  out.write(reinterpret_cast<const char*>(cloud.points.data()),
            static_cast<std::streamsize>(cloud.size() * 3 * sizeof(double)));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<RigidTransform> read_transforms(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  const std::uint64_t count = read_header(in, "LDZT", "transform file");
  std::vector<RigidTransform> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double row[12];
    read_exact(in, row, sizeof(row), "transform file");
    RigidTransform t;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) t.rotation(r, c) = row[4 * r + c];
      t.translation[r] = row[4 * r + 3];
    }
    validate_rotation(t.rotation);
    out.push_back(t);
  }
  return out;
}

void write_transforms(const std::filesystem::path& path,
                      const std::vector<RigidTransform>& transforms) {
  std::ofstream out = open_out(path, true);
  write_header(out, "LDZT", transforms.size());
  for (const RigidTransform& t : transforms) {
    double row[12];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) row[4 * r + c] = t.rotation(r, c);
      row[4 * r + 3] = t.translation[r];
    }
    out.write(reinterpret_cast<const char*>(row), sizeof(row));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::Matrix3Xd read_endpoints(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  const std::uint64_t count = read_header(in, "LDFL", "endpoint file");
  return read_vec3_block(in, count, "endpoint file");
}

void write_endpoints(const std::filesystem::path& path,
                     const Eigen::Matrix3Xd& endpoints) {
  std::ofstream out = open_out(path, true);
  write_header(out, "LDFL", static_cast<std::uint64_t>(endpoints.cols()));
  out.write(reinterpret_cast<const char*>(endpoints.data()),
            static_cast<std::streamsize>(endpoints.cols() * 3 *
                                         sizeof(double)));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_labels(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  const std::uint64_t count = read_header(in, "LDLB", "label file");
  std::vector<std::uint8_t> out(count);
  if (count > 0) read_exact(in, out.data(), count, "label file");
  return out;
}

void write_labels(const std::filesystem::path& path,
                  const std::vector<std::uint8_t>& labels) {
  std::ofstream out = open_out(path, true);
  write_header(out, "LDLB", labels.size());
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

SuperpixelMap read_superpixels(const std::filesystem::path& path) {
  SuperpixelMap map = path.extension() == ".pgm" ? read_superpixels_pgm(path)
                                                 : read_superpixels_raw(path);
  map.validate();
  return map;
}

void write_superpixels(const std::filesystem::path& path,
                       const SuperpixelMap& map) {
  map.validate();
  if (path.extension() == ".pgm") {
    write_superpixels_pgm(path, map);
  } else {
    write_superpixels_raw(path, map);
  }
}

FrameSequence read_scene(const std::filesystem::path& manifest_path) {
  const json j = load_json(manifest_path);
  const std::filesystem::path dir = manifest_path.parent_path();
  const auto resolve = [&dir](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : dir / path;
  };

  FrameSequence scene;
  if (!j.contains("frames") || !j["frames"].is_array() ||
      j["frames"].empty()) {
    throw std::invalid_argument("manifest has no frames");
  }
  for (const json& fj : j["frames"]) {
    Frame frame;
    frame.cloud = read_cloud(resolve(fj.at("cloud_path").get<std::string>()));
    frame.cloud.timestamp = fj.at("timestamp").get<double>();
    frame.pose = transform_from(fj.at("pose"), "frame pose");
    scene.frames.push_back(std::move(frame));
  }
  scene.keyframe_index = j.at("keyframe_index").get<std::size_t>();
  if (!j.contains("camera")) {
    throw std::invalid_argument("manifest has no camera");
  }
  const json& cj = j["camera"];
  scene.camera.intrinsics = matrix3_from(cj.at("intrinsics"), "intrinsics");
  scene.camera.extrinsics = transform_from(cj.at("extrinsics"), "extrinsics");
  scene.camera.image_width = cj.at("width").get<int>();
  scene.camera.image_height = cj.at("height").get<int>();
  if (j.contains("superpixels")) {
    scene.superpixels =
        read_superpixels(resolve(j["superpixels"].get<std::string>()));
  }
  scene.validate();
  return scene;
}

void write_scene(const std::filesystem::path& manifest_path,
                 const FrameSequence& scene, const std::string& cloud_prefix) {
  scene.validate();
  const std::filesystem::path dir = manifest_path.parent_path();
  json frames = json::array();
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s%03zu.bin", cloud_prefix.c_str(), i);
    write_cloud(dir / name, scene.frames[i].cloud);
    frames.push_back(json{{"cloud_path", name},
                          {"timestamp", scene.frames[i].cloud.timestamp},
                          {"pose", transform_to(scene.frames[i].pose)}});
  }
  json intr = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) intr.push_back(scene.camera.intrinsics(r, c));
  }
  json j{{"frames", std::move(frames)},
         {"keyframe_index", scene.keyframe_index},
         {"camera",
          {{"intrinsics", std::move(intr)},
           {"extrinsics", transform_to(scene.camera.extrinsics)},
           {"width", scene.camera.image_width},
           {"height", scene.camera.image_height}}}};
  if (scene.superpixels) {
    const std::string sp_name = "superpixels.pgm";
    write_superpixels(dir / sp_name, *scene.superpixels);
    j["superpixels"] = sp_name;
  }
  std::ofstream out = open_out(manifest_path, false);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + manifest_path.string());
}

}  // namespace lidist
