// Command-line surface for the local-refinement toolkit: proposal synthesis,
// grid-based refinement, detection evaluation, and voxel-budget analysis.
// Subcommands compose through files: `synth` output feeds `refine`, whose
// output feeds `evaluate` / `bins`.

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "snvc/box_geom.hpp"
#include "snvc/confidence_maps.hpp"
#include "snvc/errors.hpp"
#include "snvc/esa_synth.hpp"
#include "snvc/evaluation.hpp"
#include "snvc/feature_sampling.hpp"
#include "snvc/io_util.hpp"
#include "snvc/kitti_io.hpp"
#include "snvc/oracle_backend.hpp"
#include "snvc/registration.hpp"
#include "snvc/rng.hpp"
#include "snvc/voxel_grid.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> list_stems(const std::string& dir,
                                    const std::string& ext) {
  std::vector<std::string> stems;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ext) {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

struct GridOptions {
  std::vector<int> counts{192, 32, 128};     // n_l, n_h, n_w
  std::vector<double> cells{0.03, 0.10, 0.03};  // d_l, d_h, d_w

  snvc::GridSpec spec() const {
    snvc::GridSpec s;
    s.n_l = counts[0];
    s.n_h = counts[1];
    s.n_w = counts[2];
    s.d_l = cells[0];
    s.d_h = cells[1];
    s.d_w = cells[2];
    return s;
  }
};

void add_grid_options(CLI::App* cmd, GridOptions& grid) {
  cmd->add_option("--grid-cells", grid.counts, "candidate counts n_l,n_h,n_w")
      ->expected(3);
  cmd->add_option("--grid-res", grid.cells, "cell sizes d_l,d_h,d_w in meters")
      ->expected(3);
}

struct NoiseOptions {
  snvc::NoiseSpec spec;
  double sigma_theta_deg = 5.0;

  snvc::NoiseSpec resolved() const {
    snvc::NoiseSpec out = spec;
    out.sigma_theta = sigma_theta_deg * std::numbers::pi / 180.0;
    return out;
  }
};

void add_noise_options(CLI::App* cmd, NoiseOptions& noise) {
  cmd->add_option("--sigma-x", noise.spec.sigma_x, "translation noise std, x (m)");
  cmd->add_option("--sigma-y", noise.spec.sigma_y, "translation noise std, y (m)");
  cmd->add_option("--sigma-z", noise.spec.sigma_z, "translation noise std, z (m)");
  cmd->add_option("--sigma-h", noise.spec.sigma_h, "size noise std, height (m)");
  cmd->add_option("--sigma-w", noise.spec.sigma_w, "size noise std, width (m)");
  cmd->add_option("--sigma-l", noise.spec.sigma_l, "size noise std, length (m)");
  cmd->add_option("--sigma-theta-deg", noise.sigma_theta_deg,
                  "yaw noise std (degrees)");
}

json noise_to_json(const snvc::NoiseSpec& n) {
  return json{{"sigma_x", n.sigma_x}, {"sigma_y", n.sigma_y},
              {"sigma_z", n.sigma_z}, {"sigma_h", n.sigma_h},
              {"sigma_w", n.sigma_w}, {"sigma_l", n.sigma_l},
              {"sigma_theta", n.sigma_theta}};
}

json grid_to_json(const snvc::GridSpec& g) {
  return json{{"n_l", g.n_l}, {"n_h", g.n_h}, {"n_w", g.n_w},
              {"d_l", g.d_l}, {"d_h", g.d_h}, {"d_w", g.d_w}};
}

// ---------------------------------------------------------------- synth ----

struct SynthConfig {
  std::string labels_dir;
  std::string out_dir;
  GridOptions grid;
  NoiseOptions noise_opts;
  double sigma_cells = 4.0;
  std::uint64_t seed = 0;
  int jobs = 0;
};

int run_synth(const SynthConfig& cfg) {
  const std::vector<std::string> stems = list_stems(cfg.labels_dir, ".txt");
  const snvc::GridSpec spec = cfg.grid.spec();
  const snvc::NoiseSpec noise = cfg.noise_opts.resolved();
  fs::create_directories(fs::path(cfg.out_dir) / "proposals");
  fs::create_directories(fs::path(cfg.out_dir) / "targets");

  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
  const snvc::SeededRng root(cfg.seed);
  std::atomic<int> failures{0};

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t f = 0; f < static_cast<std::int64_t>(stems.size()); ++f) {
    const std::string& stem = stems[f];
    try {
      const std::string text =
          snvc::read_text_file(cfg.labels_dir + "/" + stem + ".txt");
      std::vector<snvc::LabelRecord> records = snvc::parse_labels(text);
      std::erase_if(records, [](const snvc::LabelRecord& r) {
        return r.category == "DontCare";
      });

      std::vector<snvc::LabelRecord> proposals;
      snvc::SeededRng frame_rng = root.split(fnv1a(stem));
      for (std::size_t i = 0; i < records.size(); ++i) {
        snvc::SeededRng rng = frame_rng.split(i);
        const snvc::Box3D gt = snvc::box_from_label(records[i]);
        const snvc::TrainingPair pair = snvc::make_training_pair(
            gt, noise, spec, cfg.sigma_cells, rng);
        snvc::LabelRecord rec =
            snvc::label_from_box(pair.proposal, records[i]);
        rec.score = 1.0;
        proposals.push_back(rec);
        snvc::write_confidence_maps(cfg.out_dir + "/targets/" + stem + "_" +
                                        std::to_string(i) + ".bin",
                                    pair.target);
      }
      snvc::write_text_file_atomic(cfg.out_dir + "/proposals/" + stem + ".txt",
                                   snvc::serialize_labels(proposals));
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "synth: " << stem << ": " << e.what() << "\n";
      failures.fetch_add(1);
    }
  }

  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["noise"] = noise_to_json(noise);
  manifest["grid"] = grid_to_json(spec);
  manifest["sigma_cells"] = cfg.sigma_cells;
  manifest["frames"] = stems.size();
  snvc::write_text_file_atomic(cfg.out_dir + "/manifest.json",
                               manifest.dump(2) + "\n");
  return failures.load() == 0 ? kExitOk : kExitData;
}

// --------------------------------------------------------------- refine ----

struct RefineConfig {
  std::string proposals_dir;
  std::string out_dir;
  std::string maps_dir;   // external predictions
  std::string gt_dir;     // oracle mode
  bool oracle = false;
  GridOptions grid;
  double sigma_cells = 4.0;
  double temperature = 0.1;
  double oracle_noise_std = 0.0;
  double oracle_dropout = 0.0;
  int iterations = 1;
  std::uint64_t seed = 0;
  int jobs = 0;
};

int run_refine(const RefineConfig& cfg) {
  const std::vector<std::string> stems = list_stems(cfg.proposals_dir, ".txt");
  const snvc::GridSpec spec = cfg.grid.spec();
  fs::create_directories(cfg.out_dir);

  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
  const snvc::SeededRng root(cfg.seed);
  std::atomic<int> failures{0};

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t f = 0; f < static_cast<std::int64_t>(stems.size()); ++f) {
    const std::string& stem = stems[f];
    try {
      std::vector<snvc::LabelRecord> proposals = snvc::parse_labels(
          snvc::read_text_file(cfg.proposals_dir + "/" + stem + ".txt"));

      std::vector<snvc::LabelRecord> gts;
      if (cfg.oracle) {
        gts = snvc::parse_labels(
            snvc::read_text_file(cfg.gt_dir + "/" + stem + ".txt"));
        std::erase_if(gts, [](const snvc::LabelRecord& r) {
          return r.category == "DontCare";
        });
        if (gts.size() != proposals.size()) {
          throw snvc::FormatError(
              stem + ": oracle mode pairs proposals with ground-truth lines "
                     "by index, but counts differ (" +
              std::to_string(proposals.size()) + " vs " +
              std::to_string(gts.size()) + ")");
        }
      }

      snvc::SeededRng frame_rng = root.split(fnv1a(stem));
      std::vector<snvc::LabelRecord> refined;
      for (std::size_t i = 0; i < proposals.size(); ++i) {
        snvc::SeededRng rng = frame_rng.split(i);
        snvc::Box3D box = snvc::box_from_label(proposals[i]);
        for (int it = 0; it < cfg.iterations; ++it) {
          const snvc::VernierGrid grid = snvc::build_grid(box, spec);
          snvc::PartConfidenceMaps maps;
          if (cfg.oracle) {
            const snvc::OracleNoise noise{cfg.oracle_noise_std,
                                          cfg.oracle_dropout};
            maps = snvc::oracle_predict(grid, snvc::box_from_label(gts[i]),
                                        cfg.sigma_cells, noise, rng);
          } else {
            maps = snvc::read_confidence_maps(cfg.maps_dir + "/" + stem + "_" +
                                              std::to_string(i) + ".bin");
            if (maps.n_w != spec.n_w || maps.n_l != spec.n_l) {
              throw snvc::FormatError(stem + ": map container shape " +
                                      std::to_string(maps.n_w) + "x" +
                                      std::to_string(maps.n_l) +
                                      " does not match the grid");
            }
          }
          const snvc::DecodedParts decoded =
              snvc::decode(maps, grid, cfg.temperature);
          box = snvc::refine(box, decoded).box;
        }
        refined.push_back(snvc::label_from_box(box, proposals[i]));
      }
      snvc::write_text_file_atomic(cfg.out_dir + "/" + stem + ".txt",
                                   snvc::serialize_labels(refined));
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "refine: " << stem << ": " << e.what() << "\n";
      failures.fetch_add(1);
    }
  }
  return failures.load() == 0 ? kExitOk : kExitData;
}

// ------------------------------------------------------------- evaluate ----

struct EvaluateConfig {
  std::string gt_dir;
  std::string pred_dir;
  std::string out_path;
  std::string metric = "3d";
  std::string level = "all";
  std::string category = "Car";
  double iou = 0.7;
};

json curve_to_json(const snvc::PrCurve& curve) {
  json points = json::array();
  for (const snvc::PrPoint& p : curve.points) {
    points.push_back(
        {{"score", p.score}, {"precision", p.precision}, {"recall", p.recall}});
  }
  json out;
  out["num_gt"] = curve.num_gt;
  out["ap_r11"] = curve.ap_r11.has_value() ? json(*curve.ap_r11) : json();
  out["ap_r40"] = curve.ap_r40.has_value() ? json(*curve.ap_r40) : json();
  out["curve"] = points;
  return out;
}

int run_evaluate(const EvaluateConfig& cfg) {
  const std::vector<snvc::DetectionFrame> frames =
      snvc::load_frames(cfg.gt_dir, cfg.pred_dir);
  const snvc::IouMetric metric =
      cfg.metric == "bev" ? snvc::IouMetric::bev : snvc::IouMetric::iou3d;
  snvc::EvalConfig eval_cfg;
  eval_cfg.category = cfg.category;

  const std::map<std::string, snvc::Difficulty> levels{
      {"easy", snvc::Difficulty::easy},
      {"moderate", snvc::Difficulty::moderate},
      {"hard", snvc::Difficulty::hard}};

  json reports = json::array();
  for (const auto& [name, level] : levels) {
    if (cfg.level != "all" && cfg.level != name) continue;
    const snvc::PrCurve curve =
        snvc::compute_ap(frames, metric, cfg.iou, level, eval_cfg);
    json report = curve_to_json(curve);
    report["metric"] = cfg.metric;
    report["level"] = name;
    report["iou_threshold"] = cfg.iou;
    report["category"] = cfg.category;
    reports.push_back(report);
  }

  const std::string text = reports.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    snvc::write_text_file_atomic(cfg.out_path, text);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- bins ----

struct BinsConfig {
  std::string gt_dir;
  std::string pred_dir;
  std::string pred_after_dir;
  std::string out_path;
  std::string attribute = "depth";
  std::string category = "Car";
  std::vector<double> edges;
  double match_iou = 0.3;
};

int run_bins(const BinsConfig& cfg) {
  snvc::BinAttribute attr = snvc::BinAttribute::depth;
  std::vector<double> edges = cfg.edges;
  if (cfg.attribute == "occlusion") {
    attr = snvc::BinAttribute::occlusion;
    if (edges.empty()) edges = {0, 1, 2, 3, 4};
  } else if (cfg.attribute == "truncation") {
    attr = snvc::BinAttribute::truncation;
    if (edges.empty()) edges = {0.0, 0.15, 0.30, 0.50, 1.001};
  } else if (edges.empty()) {
    edges = {0, 10, 20, 30, 40, 50, 70};
  }

  const std::vector<snvc::DetectionFrame> frames =
      snvc::load_frames(cfg.gt_dir, cfg.pred_dir);
  const std::vector<snvc::BinRow> before =
      snvc::bin_analysis(frames, attr, edges, cfg.match_iou, cfg.category);

  std::vector<snvc::BinRow> after;
  if (!cfg.pred_after_dir.empty()) {
    const std::vector<snvc::DetectionFrame> frames_after =
        snvc::load_frames(cfg.gt_dir, cfg.pred_after_dir);
    after = snvc::bin_analysis(frames_after, attr, edges, cfg.match_iou,
                               cfg.category);
  }

  std::ostringstream csv;
  csv << "bin_lo,bin_hi,matched,mean_iou";
  if (!after.empty()) csv << ",matched_after,mean_iou_after";
  csv << "\n";
  for (std::size_t b = 0; b < before.size(); ++b) {
    csv << before[b].lo << ',' << before[b].hi << ',' << before[b].matched
        << ',' << before[b].mean_iou;
    if (!after.empty()) {
      csv << ',' << after[b].matched << ',' << after[b].mean_iou;
    }
    csv << "\n";
  }
  if (cfg.out_path.empty()) {
    std::cout << csv.str();
  } else {
    snvc::write_text_file_atomic(cfg.out_path, csv.str());
  }
  return kExitOk;
}

// --------------------------------------------------------------- budget ----

struct BudgetConfig {
  std::vector<double> range{60.0, 60.0, 4.0};
  double delta_g = 0.2;
  std::vector<double> deltas{0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
  std::vector<std::int64_t> proposals{1, 10, 32};
  GridOptions grid;
  std::string out_path;
};

int run_budget(const BudgetConfig& cfg) {
  const snvc::GridSpec spec = cfg.grid.spec();
  const std::array<double, 3> range{cfg.range[0], cfg.range[1], cfg.range[2]};

  std::ostringstream csv;
  csv << "delta,vanilla_novs,vernier_novs,main_scale_novs";
  for (std::int64_t n : cfg.proposals) csv << ",snvc_novs_n" << n;
  csv << "\n";
  const std::int64_t main_scale =
      snvc::voxel_budget_uniform(range[0], range[1], range[2], cfg.delta_g);
  for (double delta : cfg.deltas) {
    csv << delta << ','
        << snvc::voxel_budget_uniform(range[0], range[1], range[2], delta)
        << ',' << spec.candidate_count() << ',' << main_scale;
    for (std::int64_t n : cfg.proposals) {
      csv << ',' << snvc::voxel_budget_snvc(spec, n, range, cfg.delta_g);
    }
    csv << "\n";
  }
  if (cfg.out_path.empty()) {
    std::cout << csv.str();
  } else {
    snvc::write_text_file_atomic(cfg.out_path, csv.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------- synth-scene ----

struct SynthSceneConfig {
  std::string out_dir;
  int n_frames = 1;
  int boxes_per_frame = 4;
  std::vector<double> depth_range{10.0, 40.0};
  std::vector<double> size_mean{1.53, 1.63, 3.88};
  std::vector<double> size_std{0.08, 0.07, 0.25};
  double face_density = 200.0;
  std::uint64_t seed = 0;
};

snvc::LabelRecord label_for_scene_box(const snvc::Box3D& box,
                                      const snvc::CameraRig& rig,
                                      int image_width, int image_height) {
  snvc::LabelRecord base;
  base.category = "Car";
  snvc::LabelRecord rec = snvc::label_from_box(box, base);
  rec.alpha = snvc::normalize_angle(box.theta - std::atan2(box.x, box.z));

  double u_min = 1e9, u_max = -1e9, v_min = 1e9, v_max = -1e9;
  for (const Eigen::Vector3d& corner : snvc::parts_of(box).coords) {
    const snvc::Projection p = snvc::project(corner, rig.p_left);
    if (p.behind) continue;
    u_min = std::min(u_min, p.u);
    u_max = std::max(u_max, p.u);
    v_min = std::min(v_min, p.v);
    v_max = std::max(v_max, p.v);
  }
  rec.bbox_left = std::clamp(u_min, 0.0, static_cast<double>(image_width));
  rec.bbox_right = std::clamp(u_max, 0.0, static_cast<double>(image_width));
  rec.bbox_top = std::clamp(v_min, 0.0, static_cast<double>(image_height));
  rec.bbox_bottom = std::clamp(v_max, 0.0, static_cast<double>(image_height));
  return rec;
}

int run_synth_scene(const SynthSceneConfig& cfg) {
  for (const char* sub : {"label", "calib", "velodyne", "features"}) {
    fs::create_directories(fs::path(cfg.out_dir) / sub);
  }
  snvc::SceneSpec spec;
  spec.n_boxes = cfg.boxes_per_frame;
  spec.depth_range = {cfg.depth_range[0], cfg.depth_range[1]};
  spec.size_mean = {cfg.size_mean[0], cfg.size_mean[1], cfg.size_mean[2]};
  spec.size_std = {cfg.size_std[0], cfg.size_std[1], cfg.size_std[2]};
  spec.face_density = cfg.face_density;

  const snvc::SeededRng root(cfg.seed);
  for (int f = 0; f < cfg.n_frames; ++f) {
    char stem[16];
    std::snprintf(stem, sizeof(stem), "%06d", f);
    snvc::SeededRng rng = root.split(static_cast<std::uint64_t>(f));
    const snvc::Scene scene = snvc::render_scene(spec, rng);

    std::vector<snvc::LabelRecord> records;
    for (const snvc::Box3D& box : scene.boxes) {
      records.push_back(label_for_scene_box(box, spec.rig, spec.image_width,
                                            spec.image_height));
    }
    const std::string base = cfg.out_dir + "/";
    snvc::write_text_file_atomic(base + "label/" + stem + ".txt",
                                 snvc::serialize_labels(records));
    snvc::write_text_file_atomic(base + "calib/" + stem + ".txt",
                                 snvc::serialize_calib(spec.rig));
    snvc::write_binary_file_atomic(base + "velodyne/" + stem + ".bin",
                                   snvc::write_point_cloud(scene.cloud));
    snvc::write_feature_map(base + "features/" + stem + "_left.bin",
                            scene.left);
    snvc::write_feature_map(base + "features/" + stem + "_right.bin",
                            scene.right);
  }

  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["frames"] = cfg.n_frames;
  manifest["boxes_per_frame"] = cfg.boxes_per_frame;
  manifest["depth_range"] = cfg.depth_range;
  manifest["size_mean"] = cfg.size_mean;
  manifest["size_std"] = cfg.size_std;
  manifest["face_density"] = cfg.face_density;
  snvc::write_text_file_atomic(cfg.out_dir + "/manifest.json",
                               manifest.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------- parse-check ----

struct ParseCheckConfig {
  std::vector<std::string> labels;
  std::vector<std::string> calibs;
  std::vector<std::string> clouds;
};

int run_parse_check(const ParseCheckConfig& cfg) {
  int errors = 0;
  auto check = [&errors](const std::string& path, auto&& parser) {
    try {
      parser();
      std::cout << "ok: " << path << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << path << ": " << e.what() << "\n";
      ++errors;
    }
  };
  auto expand = [](const std::vector<std::string>& paths,
                   const std::string& ext) {
    std::vector<std::string> files;
    for (const std::string& p : paths) {
      if (fs::is_directory(p)) {
        for (const std::string& stem : list_stems(p, ext)) {
          files.push_back(p + "/" + stem + ext);
        }
      } else {
        files.push_back(p);
      }
    }
    return files;
  };

  for (const std::string& path : expand(cfg.labels, ".txt")) {
    check(path, [&path] { snvc::parse_labels(snvc::read_text_file(path)); });
  }
  for (const std::string& path : expand(cfg.calibs, ".txt")) {
    check(path, [&path] { snvc::parse_calib(snvc::read_text_file(path)); });
  }
  for (const std::string& path : expand(cfg.clouds, ".bin")) {
    check(path, [&path] { snvc::read_point_cloud(snvc::read_binary_file(path)); });
  }
  return errors == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local voxel-grid refinement toolkit for stereo 3D detection"};
  app.require_subcommand(1);
  app.set_config("--config");

  SynthConfig synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Perturb ground-truth labels into proposals plus target maps");
  synth_cmd->add_option("--labels", synth.labels_dir, "ground-truth label dir")
      ->required();
  synth_cmd->add_option("--out", synth.out_dir, "output dir")->required();
  synth_cmd->add_option("--seed", synth.seed, "root seed")->required();
  synth_cmd->add_option("--sigma-cells", synth.sigma_cells,
                        "confidence kernel width in cells");
  synth_cmd->add_option("--jobs", synth.jobs, "worker threads (0 = default)");
  add_grid_options(synth_cmd, synth.grid);
  add_noise_options(synth_cmd, synth.noise_opts);

  RefineConfig refine;
  CLI::App* refine_cmd = app.add_subcommand(
      "refine", "Refine proposals from predicted or oracle confidence maps");
  refine_cmd->add_option("--proposals", refine.proposals_dir, "proposal label dir")
      ->required();
  refine_cmd->add_option("--out", refine.out_dir, "output label dir")->required();
  refine_cmd->add_option("--maps", refine.maps_dir,
                         "dir of <frame>_<i>.bin map containers");
  refine_cmd->add_flag("--oracle", refine.oracle,
                       "use the ground-truth map oracle instead of --maps");
  refine_cmd->add_option("--gt", refine.gt_dir, "ground-truth labels (oracle mode)");
  refine_cmd->add_option("--sigma-cells", refine.sigma_cells,
                         "confidence kernel width in cells");
  refine_cmd->add_option("--temperature", refine.temperature,
                         "soft-argmax temperature");
  refine_cmd->add_option("--oracle-noise-std", refine.oracle_noise_std,
                         "oracle map noise std");
  refine_cmd->add_option("--oracle-dropout", refine.oracle_dropout,
                         "oracle part dropout probability");
  refine_cmd->add_option("--iterations", refine.iterations,
                         "refinement passes (oracle mode only for >1)");
  refine_cmd->add_option("--seed", refine.seed, "root seed (noisy oracle)");
  refine_cmd->add_option("--jobs", refine.jobs, "worker threads (0 = default)");
  add_grid_options(refine_cmd, refine.grid);

  EvaluateConfig evaluate;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Average-precision report (JSON)");
  eval_cmd->add_option("--gt", evaluate.gt_dir, "ground-truth label dir")
      ->required();
  eval_cmd->add_option("--pred", evaluate.pred_dir, "prediction label dir")
      ->required();
  eval_cmd->add_option("--out", evaluate.out_path, "report path (default stdout)");
  eval_cmd->add_option("--metric", evaluate.metric, "3d or bev")
      ->check(CLI::IsMember({"3d", "bev"}));
  eval_cmd->add_option("--level", evaluate.level, "difficulty level or all")
      ->check(CLI::IsMember({"easy", "moderate", "hard", "all"}));
  eval_cmd->add_option("--iou", evaluate.iou, "IoU threshold");
  eval_cmd->add_option("--category", evaluate.category, "evaluated category");

  BinsConfig bins;
  CLI::App* bins_cmd = app.add_subcommand(
      "bins", "Attribute-binned best-match IoU table (CSV)");
  bins_cmd->add_option("--gt", bins.gt_dir, "ground-truth label dir")->required();
  bins_cmd->add_option("--pred", bins.pred_dir, "prediction label dir")
      ->required();
  bins_cmd->add_option("--pred-after", bins.pred_after_dir,
                       "second prediction dir (after refinement)");
  bins_cmd->add_option("--out", bins.out_path, "CSV path (default stdout)");
  bins_cmd->add_option("--attribute", bins.attribute,
                       "depth, occlusion or truncation")
      ->check(CLI::IsMember({"depth", "occlusion", "truncation"}));
  bins_cmd->add_option("--edges", bins.edges, "bin edges (monotone)");
  bins_cmd->add_option("--match-iou", bins.match_iou, "3D IoU match gate");
  bins_cmd->add_option("--category", bins.category, "evaluated category");

  BudgetConfig budget;
  CLI::App* budget_cmd = app.add_subcommand(
      "budget", "Voxel-count comparison of uniform vs two-scale grids (CSV)");
  budget_cmd->add_option("--range", budget.range, "global range L W H (m)")
      ->expected(3);
  budget_cmd->add_option("--delta-g", budget.delta_g, "coarse global voxel size");
  budget_cmd->add_option("--deltas", budget.deltas, "uniform voxel sizes to sweep");
  budget_cmd->add_option("--proposals", budget.proposals,
                         "proposal counts for the two-scale total");
  budget_cmd->add_option("--out", budget.out_path, "CSV path (default stdout)");
  add_grid_options(budget_cmd, budget.grid);

  SynthSceneConfig scene;
  CLI::App* scene_cmd = app.add_subcommand(
      "synth-scene", "Generate a synthetic stereo dataset (labels, features, cloud)");
  scene_cmd->add_option("--out", scene.out_dir, "output dataset dir")->required();
  scene_cmd->add_option("--seed", scene.seed, "root seed")->required();
  scene_cmd->add_option("--frames", scene.n_frames, "number of frames");
  scene_cmd->add_option("--boxes", scene.boxes_per_frame, "boxes per frame");
  scene_cmd->add_option("--depth-range", scene.depth_range, "depth range (m)")
      ->expected(2);
  scene_cmd->add_option("--size-mean", scene.size_mean, "mean h w l (m)")
      ->expected(3);
  scene_cmd->add_option("--size-std", scene.size_std, "size std h w l (m)")
      ->expected(3);
  scene_cmd->add_option("--face-density", scene.face_density,
                        "cloud points per square meter");

  ParseCheckConfig parse_check;
  CLI::App* parse_cmd = app.add_subcommand(
      "parse-check", "Validate label/calib/cloud files and report errors");
  parse_cmd->add_option("--labels", parse_check.labels, "label files or dirs");
  parse_cmd->add_option("--calib", parse_check.calibs, "calib files or dirs");
  parse_cmd->add_option("--cloud", parse_check.clouds, "cloud files or dirs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (refine_cmd->parsed()) {
      if (refine.oracle && refine.gt_dir.empty()) {
        std::cerr << "refine: --oracle requires --gt\n";
        return kExitUsage;
      }
      if (!refine.oracle && refine.maps_dir.empty()) {
        std::cerr << "refine: either --maps or --oracle is required\n";
        return kExitUsage;
      }
      if (!refine.oracle && refine.iterations > 1) {
        std::cerr << "refine: --iterations > 1 needs the oracle (external maps "
                     "are tied to the original grid)\n";
        return kExitUsage;
      }
      return run_refine(refine);
    }
    if (eval_cmd->parsed()) return run_evaluate(evaluate);
    if (bins_cmd->parsed()) return run_bins(bins);
    if (budget_cmd->parsed()) return run_budget(budget);
    if (scene_cmd->parsed()) return run_synth_scene(scene);
    if (parse_cmd->parsed()) return run_parse_check(parse_check);
  } catch (const snvc::FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
