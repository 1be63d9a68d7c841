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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lidist/core.hpp"
#include "lidist/flow.hpp"
#include "lidist/io.hpp"
#include "lidist/loss.hpp"
#include "lidist/match.hpp"
#include "lidist/ppm.hpp"
#include "lidist/quantize.hpp"
#include "lidist/rng.hpp"
#include "lidist/synth.hpp"

namespace {

using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw lidist::IoError("cannot open output: " + path.string());
  }
  out << text;
  out.flush();
  if (!out) {
    throw lidist::IoError("write failed: " + path.string());
  }
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_text_file(out_path, text);
}

std::vector<double> parse_number_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      while (used < part.size() &&
             std::isspace(static_cast<unsigned char>(part[used]))) {
        ++used;
      }
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) +
                                  ": not a number: " + part);
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

Eigen::Vector3d parse_triple(const std::string& s, const char* what) {
  const std::vector<double> v = parse_number_list(s, what);
  if (v.size() != 3) {
    throw std::invalid_argument(std::string(what) +
                                " must be three comma-separated numbers");
  }
  return {v[0], v[1], v[2]};
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw lidist::IoError("cannot open file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_number_list(line, "feature row"));
    if (rows.back().size() != rows.front().size()) {
      throw std::invalid_argument("ragged rows in " + path.string());
    }
  }
  if (rows.empty()) {
    throw std::invalid_argument("empty feature file: " + path.string());
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return m;
}

lidist::PointCloud uniform_cloud(std::int64_t n, double extent,
                                 std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("point count must be >= 0");
  if (!(extent > 0.0)) throw std::invalid_argument("extent must be > 0");
  lidist::Rng rng(seed);
  Eigen::Matrix3Xd pts(3, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    for (int a = 0; a < 3; ++a) pts(a, i) = rng.uniform(0.0, extent);
  }
  return lidist::make_cloud(std::move(pts));
}

// Restricts a sequence to the `window` frames centered on the keyframe
// ((window - 1) / 2 on each side, clipped at the ends). window == 0 keeps
// everything.
lidist::FrameSequence apply_window(lidist::FrameSequence frames, int window) {
  if (window <= 0) return frames;
  const std::size_t half = static_cast<std::size_t>((window - 1) / 2);
  const std::size_t key = frames.keyframe_index;
  const std::size_t lo = key > half ? key - half : 0;
  const std::size_t hi = std::min(frames.frames.size(), key + half + 1);
  std::vector<lidist::Frame> kept(frames.frames.begin() + lo,
                                  frames.frames.begin() + hi);
  frames.frames = std::move(kept);
  frames.keyframe_index = key - lo;
  return frames;
}

struct QuantOpts {
  std::string cloud_path;
  std::int64_t uniform_n = 0;
  bool uniform_given = false;
  double extent = 50.0;
  std::string coord = "cart";
  std::string voxel;
  double bin_width = 10.0;
  std::string profile_path;
  std::string out_path;
};

void run_quant(const QuantOpts& o, std::uint64_t seed) {
  if (o.cloud_path.empty() && !o.uniform_given) {
    throw std::invalid_argument("quant needs --cloud or --uniform");
  }
  lidist::PointCloud cloud = o.cloud_path.empty()
                                 ? uniform_cloud(o.uniform_n, o.extent, seed)
                                 : lidist::read_cloud(o.cloud_path);

  lidist::VoxelSpec spec;
  if (o.coord == "cart") {
    spec.system = lidist::CoordSystem::kCartesian;
    spec.sizes = o.voxel.empty() ? Eigen::Vector3d::Constant(0.1)
                                 : parse_triple(o.voxel, "--voxel");
  } else if (o.coord == "cyl") {
    spec.system = lidist::CoordSystem::kCylindrical;
    Eigen::Vector3d v = o.voxel.empty() ? Eigen::Vector3d(0.1, 1.0, 0.1)
                                        : parse_triple(o.voxel, "--voxel");
    v[1] = lidist::deg_to_rad(v[1]);  // azimuth size is given in degrees
    spec.sizes = v;
  } else {
    throw std::invalid_argument("--coord must be cart or cyl");
  }

  const lidist::QuantizedCloud q = lidist::quantize(cloud, spec);
  const lidist::ErrorStats err = lidist::quantization_error(cloud, spec);

  json summary;
  summary["n"] = cloud.size();
  summary["retained"] = q.size();
  summary["dropped"] = q.dropped_count;
  summary["drop_rate"] =
      static_cast<double>(q.dropped_count) / static_cast<double>(cloud.size());
  summary["mean_error_mm"] = err.mean * 1000.0;
  emit(summary, o.out_path);

  if (!o.profile_path.empty()) {
    const auto profile =
        lidist::error_vs_distance_profile(cloud, spec, o.bin_width);
    std::string csv = "bin_lo_m,bin_hi_m,count,mean_error_mm\n";
    for (const auto& bin : profile) {
      csv += fmt_g17(bin.lo) + "," + fmt_g17(bin.hi) + "," +
             std::to_string(bin.count) + "," +
             fmt_g17(bin.mean_error * 1000.0) + "\n";
    }
    write_text_file(o.profile_path, csv);
  }
}

struct GenSceneOpts {
  std::string script_path;
  std::string out_dir;
};

void run_gen_scene(const GenSceneOpts& o, std::uint64_t seed,
                   bool seed_given) {
  lidist::SceneScript script = lidist::read_scene_script(o.script_path);
  if (seed_given) script.seed = seed;
  const lidist::GeneratedScene scene = lidist::generate(script);

  const std::filesystem::path dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw lidist::IoError("cannot create output directory: " + dir.string());
  }
  lidist::write_scene(dir / "manifest.json", scene.frames);
  lidist::write_endpoints(dir / "gt_flow.bin", scene.gt_keyframe_position);
  lidist::write_labels(dir / "gt_labels.bin", scene.gt_label);

  std::int64_t total = 0;
  for (const auto& f : scene.frames.frames) total += f.cloud.size();
  json info;
  info["frames"] = scene.frames.frames.size();
  info["points_total"] = total;
  info["points_interframe"] = scene.gt_keyframe_position.cols();
  info["out_dir"] = dir.string();
  emit(info, "");
}

struct GenCloudOpts {
  std::int64_t n = 0;
  double extent = 50.0;
  std::string out_path;
};

void run_gen_cloud(const GenCloudOpts& o, std::uint64_t seed) {
  const lidist::PointCloud cloud = uniform_cloud(o.n, o.extent, seed);
  lidist::write_cloud(o.out_path, cloud);
  json info;
  info["n"] = cloud.size();
  info["path"] = o.out_path;
  emit(info, "");
}

struct PpmOpts {
  std::string scene_path;
  std::string out_path;
  std::string diag_path;
  int window = 0;
  double c = 0.5;
  int min_track_points = 5;
  double eps = 0.5;
  int min_pts = 10;
  int icp_iters = 50;
  double icp_tol = 1e-6;
  double max_corr = 2.0;
};

void run_ppm(const PpmOpts& o, std::uint64_t seed, int threads) {
  lidist::FrameSequence frames =
      apply_window(lidist::read_scene(o.scene_path), o.window);

  lidist::PpmParams params;
  params.tracking.c = o.c;
  params.tracking.min_track_points = o.min_track_points;
  params.dbscan.eps = o.eps;
  params.dbscan.min_pts = o.min_pts;
  params.icp.max_iters = o.icp_iters;
  params.icp.tol = o.icp_tol;
  params.icp.max_corr_dist = o.max_corr;
  params.seed = seed;
  params.threads = threads;

  const lidist::PpmResult res = lidist::mine(frames, params);
  const std::vector<lidist::RigidTransform> z =
      lidist::interframe_transforms(res, frames.keyframe_index);
  if (!o.out_path.empty()) lidist::write_transforms(o.out_path, z);

  json diag;
  diag["points_total"] = res.aggregate.cloud.size();
  diag["points_interframe"] = z.size();
  diag["ground_status"] =
      res.ground_status == lidist::GroundStatus::kOk ? "ok" : "no_plane";
  diag["ground_fraction"] = res.ground_fraction;
  diag["cluster_count"] = res.labeling.cluster_count;
  diag["moving_cluster_count"] = res.moving_cluster_count;
  diag["registrations"] = json::array();
  for (const auto& reg : res.registrations) {
    json r;
    r["cluster"] = reg.cluster_id;
    r["timestamp"] = reg.timestamp;
    r["target_timestamp"] = reg.target_timestamp;
    r["points"] = reg.points;
    r["rmse"] = reg.rmse;
    r["iterations"] = reg.iterations;
    r["status"] = reg.status == lidist::IcpStatus::kOk ? "ok" : "degenerate";
    r["chained"] = reg.chained;
    diag["registrations"].push_back(std::move(r));
  }
  diag["warnings"] = res.warnings;
  emit(diag, o.diag_path);
}

struct MatchOpts {
  std::string scene_path;
  std::string mode = "synced";
  std::string z_path;
  std::string out_path;
  int frame = -1;
  std::string image_times;
};

void run_match(const MatchOpts& o) {
  const lidist::FrameSequence frames = lidist::read_scene(o.scene_path);
  const lidist::SuperpixelMap* sp =
      frames.superpixels ? &*frames.superpixels : nullptr;
  const std::size_t key = frames.keyframe_index;
  std::string csv;

  const auto append_rows = [&](const lidist::CorrespondenceSet& cs,
                               std::size_t point_frame) {
    for (const auto& e : cs.entries) {
      csv += std::to_string(e.point_index) + "," + fmt_g17(e.u) + "," +
             fmt_g17(e.v) + ",";
      csv += e.superpixel ? std::to_string(*e.superpixel) : std::string("-1");
      csv += "," + std::to_string(point_frame) + "," + std::to_string(key) +
             "\n";
    }
  };

  if (o.mode == "synced") {
    csv = "point_index,u,v,superpixel_id,point_frame,image_frame\n";
    append_rows(lidist::match_synced(frames.camera, frames.keyframe().cloud,
                                     sp),
                key);
  } else if (o.mode == "unsynced") {
    if (o.z_path.empty()) {
      throw std::invalid_argument("--mode unsynced needs --z");
    }
    const std::vector<lidist::RigidTransform> z =
        lidist::read_transforms(o.z_path);
    std::int64_t expected = 0;
    for (std::size_t s = 0; s < frames.frames.size(); ++s) {
      if (s != key) expected += frames.frames[s].cloud.size();
    }
    if (static_cast<std::int64_t>(z.size()) != expected) {
      throw std::invalid_argument(
          "transform count does not match inter-frame points: " +
          std::to_string(z.size()) + " vs " + std::to_string(expected));
    }
    if (o.frame >= 0 &&
        (static_cast<std::size_t>(o.frame) >= frames.frames.size() ||
         static_cast<std::size_t>(o.frame) == key)) {
      throw std::invalid_argument("--frame must name an inter-frame");
    }
    const lidist::RigidTransform key_pose_inv =
        frames.keyframe().pose.inverse();
    const double key_ts = frames.keyframe().cloud.timestamp;
    csv = "point_index,u,v,superpixel_id,point_frame,image_frame\n";
    std::size_t offset = 0;
    for (std::size_t s = 0; s < frames.frames.size(); ++s) {
      if (s == key) continue;
      const lidist::Frame& fr = frames.frames[s];
      const std::size_t count = static_cast<std::size_t>(fr.cloud.size());
      if (o.frame < 0 || static_cast<std::size_t>(o.frame) == s) {
        const lidist::PointCloud in_key = lidist::apply(
            lidist::compose(key_pose_inv, fr.pose), fr.cloud);
        const std::vector<lidist::RigidTransform> slice(
            z.begin() + offset, z.begin() + offset + count);
        append_rows(lidist::match_unsynced(frames.camera, in_key, slice, sp,
                                           key_ts),
                    s);
      }
      offset += count;
    }
  } else if (o.mode == "nearest") {
    if (o.image_times.empty()) {
      throw std::invalid_argument("--mode nearest needs --image-times");
    }
    const std::vector<double> image_ts =
        parse_number_list(o.image_times, "--image-times");
    std::vector<double> lidar_ts;
    for (const auto& f : frames.frames) lidar_ts.push_back(f.cloud.timestamp);
    const std::vector<std::size_t> picks =
        lidist::nearest_alignment(lidar_ts, image_ts);
    csv = "lidar_index,image_index\n";
    for (std::size_t i = 0; i < picks.size(); ++i) {
      csv += std::to_string(i) + "," + std::to_string(picks[i]) + "\n";
    }
  } else {
    throw std::invalid_argument("--mode must be synced, unsynced, or nearest");
  }

  if (o.out_path.empty()) {
    std::cout << csv;
  } else {
    write_text_file(o.out_path, csv);
  }
}

struct EvalOpts {
  std::string scene_path;
  std::string z_path;
  std::string gt_flow_path;
  std::string gt_labels_path;
  std::string out_path;
  std::string csv_path;
};

json eval_to_json(const std::optional<lidist::FlowEval>& e) {
  if (!e) return nullptr;
  json j;
  j["count"] = e->count;
  j["epe_avg"] = e->epe_avg;
  j["epe_med"] = e->epe_med;
  j["acc_s"] = e->acc_s;
  j["acc_r"] = e->acc_r;
  j["outlier_rate"] = e->outlier_rate;
  return j;
}

void run_eval(const EvalOpts& o) {
  const lidist::FrameSequence frames = lidist::read_scene(o.scene_path);
  const std::vector<lidist::RigidTransform> z =
      lidist::read_transforms(o.z_path);
  const Eigen::Matrix3Xd gt = lidist::read_endpoints(o.gt_flow_path);
  const std::vector<std::uint8_t> labels =
      lidist::read_labels(o.gt_labels_path);

  const std::size_t key = frames.keyframe_index;
  const lidist::RigidTransform key_pose_inv = frames.keyframe().pose.inverse();
  std::vector<Eigen::Vector3d> start_points;
  for (std::size_t s = 0; s < frames.frames.size(); ++s) {
    if (s == key) continue;
    const lidist::RigidTransform to_key =
        lidist::compose(key_pose_inv, frames.frames[s].pose);
    const auto& pts = frames.frames[s].cloud.points;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      start_points.push_back(to_key(pts.col(i)));
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(start_points.size());
  if (static_cast<Eigen::Index>(z.size()) != n || gt.cols() != n ||
      static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument(
        "scene, transforms, flow, and labels disagree on point count");
  }
  Eigen::Matrix3Xd start(3, n), predicted(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    start.col(i) = start_points[static_cast<std::size_t>(i)];
    predicted.col(i) = z[static_cast<std::size_t>(i)](start.col(i));
  }

  const lidist::FlowReport report =
      lidist::evaluate_flow(predicted, gt, start, labels);
  json out;
  out["static_part"] = eval_to_json(report.static_part);
  out["dynamic_foreground"] = eval_to_json(report.dynamic_foreground);
  emit(out, o.out_path);

  if (!o.csv_path.empty()) {
    std::string csv =
        "static_epe_avg,static_acc_s,static_acc_r,static_outlier,"
        "dyn_epe_avg,dyn_epe_med,dyn_acc_s,dyn_acc_r,dyn_outlier\n";
    const auto& st = report.static_part;
    const auto& dy = report.dynamic_foreground;
    csv += st ? fmt_g17(st->epe_avg) + "," + fmt_g17(st->acc_s) + "," +
                    fmt_g17(st->acc_r) + "," + fmt_g17(st->outlier_rate)
              : std::string(",,,");
    csv += ",";
    csv += dy ? fmt_g17(dy->epe_avg) + "," + fmt_g17(dy->epe_med) + "," +
                    fmt_g17(dy->acc_s) + "," + fmt_g17(dy->acc_r) + "," +
                    fmt_g17(dy->outlier_rate)
              : std::string(",,,,");
    csv += "\n";
    write_text_file(o.csv_path, csv);
  }
}

struct LossOpts {
  int m = 8;
  int d = 16;
  double tau = 0.07;
  bool normalize = true;
  std::string f_path;
  std::string g_path;
  std::string out_path;
};

// Max |analytic - central difference| over an entry subset, scaled by the
// largest analytic gradient magnitude.
double grad_check(const Eigen::MatrixXd& raw_f, const Eigen::MatrixXd& raw_g,
                  double tau, bool normalize, const Eigen::MatrixXd& df,
                  const Eigen::MatrixXd& dg, std::int64_t* checked) {
  const auto loss_of = [&](const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) {
    return normalize ? lidist::contrastive_loss(lidist::l2_normalize(f),
                                                lidist::l2_normalize(g), tau)
                     : lidist::contrastive_loss(f, g, tau);
  };
  const double scale =
      std::max({df.cwiseAbs().maxCoeff(), dg.cwiseAbs().maxCoeff(), 1e-12});
  const double h = 1e-6;
  const std::int64_t total = 2 * raw_f.size();
  const std::int64_t stride = std::max<std::int64_t>(1, total / 4096);
  double worst = 0.0;
  std::int64_t n = 0;
  for (std::int64_t k = 0; k < total; k += stride) {
    const bool on_f = k < raw_f.size();
    Eigen::MatrixXd f = raw_f;
    Eigen::MatrixXd g = raw_g;
    double* slot = on_f ? f.data() + k : g.data() + (k - raw_f.size());
    const double analytic =
        on_f ? df(k % df.rows(), k / df.rows())
             : dg((k - raw_f.size()) % dg.rows(),
                  (k - raw_f.size()) / dg.rows());
    const double saved = *slot;
    *slot = saved + h;
    const double up = loss_of(f, g);
    *slot = saved - h;
    const double down = loss_of(f, g);
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic - fd) / scale);
    ++n;
  }
  if (checked) *checked = n;
  return worst;
}

void run_loss(const LossOpts& o, std::uint64_t seed) {
  if (o.f_path.empty() != o.g_path.empty()) {
    throw std::invalid_argument("--f and --g must be given together");
  }
  Eigen::MatrixXd raw_f, raw_g;
  if (!o.f_path.empty()) {
    raw_f = read_matrix_csv(o.f_path);
    raw_g = read_matrix_csv(o.g_path);
  } else {
    if (o.m < 1 || o.d < 1) throw std::invalid_argument("--m/--d must be >= 1");
    lidist::Rng rng(seed);
    raw_f.resize(o.m, o.d);
    raw_g.resize(o.m, o.d);
    for (Eigen::Index r = 0; r < raw_f.rows(); ++r) {
      for (Eigen::Index c = 0; c < raw_f.cols(); ++c) {
        raw_f(r, c) = rng.normal();
      }
    }
    for (Eigen::Index r = 0; r < raw_g.rows(); ++r) {
      for (Eigen::Index c = 0; c < raw_g.cols(); ++c) {
        raw_g(r, c) = rng.normal();
      }
    }
  }

  double loss;
  Eigen::MatrixXd df, dg;
  if (o.normalize) {
    const Eigen::MatrixXd f = lidist::l2_normalize(raw_f);
    const Eigen::MatrixXd g = lidist::l2_normalize(raw_g);
    loss = lidist::contrastive_loss(f, g, o.tau);
    const lidist::LossGrad grads = lidist::contrastive_loss_grad(f, g, o.tau);
    df = lidist::l2_normalize_backprop(raw_f, grads.df);
    dg = lidist::l2_normalize_backprop(raw_g, grads.dg);
  } else {
    loss = lidist::contrastive_loss(raw_f, raw_g, o.tau);
    const lidist::LossGrad grads =
        lidist::contrastive_loss_grad(raw_f, raw_g, o.tau);
    df = grads.df;
    dg = grads.dg;
  }
  std::int64_t checked = 0;
  const double err = grad_check(raw_f, raw_g, o.tau, o.normalize, df, dg,
                                &checked);

  json out;
  out["m"] = raw_f.rows();
  out["d"] = raw_f.cols();
  out["tau"] = o.tau;
  out["normalize"] = o.normalize;
  out["loss"] = loss;
  out["grad_max_rel_err"] = err;
  out["checked_entries"] = checked;
  emit(out, o.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point cloud / camera correspondence toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "rng seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  QuantOpts quant;
  CLI::App* quant_cmd =
      app.add_subcommand("quant", "voxel quantization error analysis");
  quant_cmd->fallthrough();
  quant_cmd->add_option("--cloud", quant.cloud_path, "input cloud (.bin/.csv)");
  CLI::Option* uniform_opt = quant_cmd->add_option(
      "--uniform", quant.uniform_n, "generate N uniform points instead");
  quant_cmd->add_option("--extent", quant.extent, "uniform cube side, meters")
      ->capture_default_str();
  quant_cmd->add_option("--coord", quant.coord, "cart or cyl")
      ->capture_default_str();
  quant_cmd->add_option("--voxel", quant.voxel,
                        "cell sizes a,b,c (cart: meters; cyl: m,deg,m)");
  quant_cmd
      ->add_option("--bin-width", quant.bin_width, "profile bin width, meters")
      ->capture_default_str();
  quant_cmd->add_option("--profile", quant.profile_path,
                        "write error-vs-distance CSV here");
  quant_cmd->add_option("--out", quant.out_path, "write summary JSON here");

  CLI::App* gen_cmd = app.add_subcommand("gen", "generate synthetic inputs");
  gen_cmd->require_subcommand(1);
  gen_cmd->fallthrough();

  GenSceneOpts gen_scene;
  CLI::App* gen_scene_cmd =
      gen_cmd->add_subcommand("scene", "generate a scripted scene");
  gen_scene_cmd->fallthrough();
  gen_scene_cmd
      ->add_option("--script", gen_scene.script_path, "scene script JSON")
      ->required();
  gen_scene_cmd->add_option("--out-dir", gen_scene.out_dir, "output directory")
      ->required();

  GenCloudOpts gen_cloud;
  CLI::App* gen_cloud_cmd =
      gen_cmd->add_subcommand("cloud", "generate a uniform cloud");
  gen_cloud_cmd->fallthrough();
  gen_cloud_cmd->add_option("--n", gen_cloud.n, "point count")->required();
  gen_cloud_cmd
      ->add_option("--extent", gen_cloud.extent, "cube side, meters")
      ->capture_default_str();
  gen_cloud_cmd->add_option("--out", gen_cloud.out_path, "output path")
      ->required();

  PpmOpts ppm;
  CLI::App* ppm_parent =
      app.add_subcommand("ppm", "positive pair mining pipeline");
  ppm_parent->require_subcommand(1);
  ppm_parent->fallthrough();
  CLI::App* ppm_cmd =
      ppm_parent->add_subcommand("run", "mine per-point rigid transforms");
  ppm_cmd->fallthrough();
  ppm_cmd->add_option("--scene", ppm.scene_path, "scene manifest")->required();
  ppm_cmd->add_option("--out", ppm.out_path, "write transforms here");
  ppm_cmd->add_option("--diag", ppm.diag_path, "write diagnostics JSON here");
  ppm_cmd->add_option("--window", ppm.window,
                      "frames centered on the keyframe (0 = all)")
      ->capture_default_str();
  ppm_cmd->add_option("--c", ppm.c, "moving threshold, meters L1")
      ->capture_default_str();
  ppm_cmd
      ->add_option("--min-track-points", ppm.min_track_points,
                   "min points per tracked centroid")
      ->capture_default_str();
  ppm_cmd->add_option("--eps", ppm.eps, "clustering radius, meters")
      ->capture_default_str();
  ppm_cmd->add_option("--min-pts", ppm.min_pts, "core point threshold")
      ->capture_default_str();
  ppm_cmd->add_option("--icp-iters", ppm.icp_iters, "max icp iterations")
      ->capture_default_str();
  ppm_cmd->add_option("--icp-tol", ppm.icp_tol, "icp stop tolerance")
      ->capture_default_str();
  ppm_cmd
      ->add_option("--max-corr", ppm.max_corr,
                   "correspondence rejection distance, meters")
      ->capture_default_str();

  MatchOpts match;
  CLI::App* match_cmd =
      app.add_subcommand("match", "project points into the camera");
  match_cmd->fallthrough();
  match_cmd->add_option("--scene", match.scene_path, "scene manifest")
      ->required();
  match_cmd->add_option("--mode", match.mode, "synced, unsynced, or nearest")
      ->capture_default_str();
  match_cmd->add_option("--z", match.z_path, "per-point transforms (unsynced)");
  match_cmd->add_option("--frame", match.frame,
                        "restrict unsynced mode to one frame index");
  match_cmd->add_option("--image-times", match.image_times,
                        "comma-separated image timestamps (nearest)");
  match_cmd->add_option("--out", match.out_path, "write CSV here");

  EvalOpts eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "score transforms against ground truth");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--scene", eval.scene_path, "scene manifest")
      ->required();
  eval_cmd->add_option("--z", eval.z_path, "per-point transforms")->required();
  eval_cmd->add_option("--gt-flow", eval.gt_flow_path, "ground-truth endpoints")
      ->required();
  eval_cmd->add_option("--gt-labels", eval.gt_labels_path, "per-point labels")
      ->required();
  eval_cmd->add_option("--out", eval.out_path, "write metrics JSON here");
  eval_cmd->add_option("--csv", eval.csv_path, "write metrics CSV row here");

  LossOpts loss;
  CLI::App* loss_parent =
      app.add_subcommand("loss", "contrastive loss kernel");
  loss_parent->require_subcommand(1);
  loss_parent->fallthrough();
  CLI::App* loss_cmd = loss_parent->add_subcommand(
      "check", "loss value and gradient check");
  loss_cmd->fallthrough();
  loss_cmd->add_option("--m", loss.m, "pair count (random mode)")
      ->capture_default_str();
  loss_cmd->add_option("--d", loss.d, "feature dimension (random mode)")
      ->capture_default_str();
  loss_cmd->add_option("--tau", loss.tau, "temperature")->capture_default_str();
  loss_cmd->add_flag("--normalize,!--no-normalize", loss.normalize,
                     "l2-normalize rows before the loss");
  loss_cmd->add_option("--f", loss.f_path, "point feature CSV (rows = pairs)");
  loss_cmd->add_option("--g", loss.g_path, "pixel feature CSV (rows = pairs)");
  loss_cmd->add_option("--out", loss.out_path, "write report JSON here");

  quant_cmd->callback([&] {
    quant.uniform_given = uniform_opt->count() > 0;
    run_quant(quant, seed);
  });
  gen_scene_cmd->callback(
      [&] { run_gen_scene(gen_scene, seed, seed_opt->count() > 0); });
  gen_cloud_cmd->callback([&] { run_gen_cloud(gen_cloud, seed); });
  ppm_cmd->callback([&] { run_ppm(ppm, seed, threads); });
  match_cmd->callback([&] { run_match(match); });
  eval_cmd->callback([&] { run_eval(eval); });
  loss_cmd->callback([&] { run_loss(loss, seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lidist::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
