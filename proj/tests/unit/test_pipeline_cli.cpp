// Copyright 2026 The travgrid Authors
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

#include <cstdlib>
#include <fstream>
#include <set>

#include "doctest.h"
#include "synthetic.hpp"
#include "travgrid/cell_features.hpp"
#include "travgrid/commands.hpp"
#include "travgrid/dataset.hpp"
#include "travgrid/error.hpp"
#include "travgrid/image.hpp"
#include "travgrid/log.hpp"
#include "travgrid/pipeline.hpp"
#include "travgrid/postfilter.hpp"

using namespace travgrid;
namespace fs = std::filesystem;

namespace {

struct CapturedLog {
  std::vector<std::string> warnings;
  LogSink previous;
  CapturedLog() {
    previous = set_log_sink([this](LogLevel l, const std::string& m) {
      if (l == LogLevel::kWarning) warnings.push_back(m);
    });
  }
  ~CapturedLog() { set_log_sink(previous); }
};

fixture::SceneSpec light_spec() {
  fixture::SceneSpec s;
  s.azimuth_steps = 360;
  return s;
}

// Road + boxes, no grass: geometry alone separates the classes.
struct Workspace {
  fs::path dir;
  PipelineConfig cfg;
  SvmModel model;

  Workspace() {
    dir = fixture::scratch_dir("pipeline");
    fixture::SceneSpec spec = light_spec();
    spec.with_grass = false;
    fixture::write_sequence(dir / "data", spec);
    cfg = fixture::fixture_config(dir / "data", dir / "out");
    cfg.feature_mode = FeatureMode::kGeometricOnly;
    cfg.train.negative_weight = 5.0;  // boxes are ~5% of the cells
    cmd_extract_features(cfg, cfg.train_frames);
    model = cmd_train(cfg).model;
  }
  ~Workspace() { fs::remove_all(dir); }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

std::string slurp(const fs::path& p) { return read_file(p); }

std::size_t count_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRAVGRID_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& path, const PipelineConfig& cfg) {
  write_file(path, format_config(cfg));
  return path;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree") {
  const fixture::Scene scene(light_spec());
  for (FeatureMode mode : {FeatureMode::kHybrid, FeatureMode::kGeometricOnly}) {
    PipelineConfig a;
    a.feature_mode = mode;
    PipelineConfig b = a;
    b.parallel = true;
    Pipeline serial(a, scene.camera()), parallel(b, scene.camera());
    for (int f = 0; f < 6; ++f) {
      const RgbImage img = scene.image(f);
      auto ra = serial.push(f, FrameInput{scene.scan(f), scene.lidar_pose(f), &img});
      auto rb = parallel.push(f, FrameInput{scene.scan(f), scene.lidar_pose(f), &img});
      REQUIRE(ra.has_value() == rb.has_value());
      if (!ra) continue;
      CHECK(ra->features == rb->features);
      const auto ga = grid_geom_features(ra->grid, ra->cloud, ra->lidar_pose.translation, a.grid, false);
      const auto gb = grid_geom_features(ra->grid, ra->cloud, ra->lidar_pose.translation, a.grid, true);
      for (std::size_t i = 0; i < ga.size(); ++i) {
        REQUIRE(ga[i].has_value() == gb[i].has_value());
        if (ga[i]) CHECK(ga[i]->to_array() == gb[i]->to_array());
      }
      CameraModel cam = scene.camera();
      cam.width = img.width;
      cam.height = img.height;
      const auto ha = grid_hsv_counts(ra->grid, ra->cloud, ga, cam, ra->lidar_pose, img, a.grid, false);
      const auto hb = grid_hsv_counts(ra->grid, ra->cloud, ga, cam, ra->lidar_pose, img, a.grid, true);
      CHECK(ha == hb);
      if (mode == FeatureMode::kGeometricOnly) {
        TraversabilityGrid pa = ra->grid, pb = ra->grid;
        predict_grid(pa, ra->features, workspace().model, false);
        predict_grid(pb, ra->features, workspace().model, true);
        for (std::size_t i = 0; i < pa.cell_count(); ++i)
          CHECK(pa.cells[i].predicted_label == pb.cells[i].predicted_label);
        const auto fa = filter_grid(pa, 3, false), fb = filter_grid(pa, 3, true);
        for (std::size_t i = 0; i < fa.cell_count(); ++i)
          CHECK(fa.cells[i].filtered_label == fb.cells[i].filtered_label);
      }
    }
  }
}

TEST_CASE("extract-features is deterministic and sized by mode") {
  Workspace& w = workspace();
  const std::string first = slurp(features_path(w.cfg));
  cmd_extract_features(w.cfg, w.cfg.train_frames);
  CHECK(slurp(features_path(w.cfg)) == first);
  const FeatureTable geo = read_feature_table(features_path(w.cfg));
  CHECK(geo.dim == 21);
  REQUIRE_FALSE(geo.rows.empty());
  CHECK(geo.rows.front().size() == 21);

  PipelineConfig hybrid = w.cfg;
  hybrid.feature_mode = FeatureMode::kHybrid;
  hybrid.output_dir = w.dir / "out_hybrid";
  const FeatureTable hy = cmd_extract_features(hybrid, FrameRange{2, 3});
  CHECK(hy.dim == 109);
  REQUIRE_FALSE(hy.rows.empty());
  CHECK(hy.rows.front().size() == 109);

  PipelineConfig capped = hybrid;
  capped.max_train_samples = 50;
  const FeatureTable sub = cmd_extract_features(capped, FrameRange{2, 3});
  CHECK(sub.rows.size() == 50);
  CHECK(cmd_extract_features(capped, FrameRange{2, 3}).rows == sub.rows);
}

TEST_CASE("training is reproducible and checks its inputs") {
  Workspace& w = workspace();
  const std::string model_text = slurp(model_path(w.cfg));
  cmd_train(w.cfg);
  CHECK(slurp(model_path(w.cfg)) == model_text);
  CHECK(slurp(cv_report_path(w.cfg)).rfind("c,gamma,mean_accuracy", 0) == 0);

  PipelineConfig other = w.cfg;
  other.output_dir = w.dir / "empty_out";
  CHECK_THROWS_AS(cmd_train(other), DataError);
  PipelineConfig mismatch = w.cfg;
  mismatch.feature_mode = FeatureMode::kHybrid;
  CHECK_THROWS_AS(cmd_train(mismatch), ConfigError);
}

TEST_CASE("ground truth files match a direct recomputation") {
  Workspace& w = workspace();
  CHECK(cmd_extract_gt(w.cfg, w.cfg.test_frames) == 5);
  const KittiSequence seq(w.cfg.dataset_root, w.cfg.sequence, w.cfg.compose_calib);
  for (int f = 5; f <= 9; ++f) {
    std::vector<PointCloud> scans;
    std::vector<Pose> poses;
    for (int k = f - 2; k <= f; ++k) {
      scans.push_back(seq.load_scan(k));
      poses.push_back(seq.lidar_pose(k));
    }
    const auto cloud = integrate(scans, poses, 3);
    REQUIRE(cloud);
    TraversabilityGrid g = build_grid(*cloud, snap_to_lattice(seq.lidar_pose(f).translation.head<2>(), w.cfg.grid.resolution), w.cfg.grid);
    const LabelGridFile file = read_label_grid(gt_dir(w.cfg) / (std::to_string(1000000 + f).substr(1) + ".grid"));
    CHECK(file.origin_x == g.origin_x);
    CHECK(file.origin_y == g.origin_y);
    for (const Cell& c : g.cells)
      CHECK(file.labels[g.index(c.row, c.col)] == cell_ground_truth(g, c, *cloud, w.cfg.ground_truth));
  }
}

TEST_CASE("lead-in frames and empty ranges") {
  Workspace& w = workspace();
  PipelineConfig cfg = w.cfg;
  cfg.output_dir = w.dir / "leadin";
  {
    CapturedLog log;
    CHECK(cmd_extract_gt(cfg, FrameRange{0, 2}) == 1);
    CHECK(log.warnings.size() == 2);
  }
  {
    CapturedLog log;
    CHECK(cmd_predict(cfg, FrameRange{4, 3}, model_path(w.cfg)) == 0);
    CHECK(count_files(pred_dir(cfg)) == 0);
    CHECK_FALSE(log.warnings.empty());
  }
}

TEST_CASE("predict equals staged execution; boxes are red") {
  Workspace& w = workspace();
  CHECK(cmd_predict(w.cfg, w.cfg.test_frames, model_path(w.cfg)) == 5);
  CHECK(count_files(pred_dir(w.cfg)) == 10);  // grid + raster per frame
  const auto latency = parse_latency_csv(slurp(latency_path(w.cfg)));
  CHECK(latency.size() >= 7);

  const KittiSequence seq(w.cfg.dataset_root, w.cfg.sequence, w.cfg.compose_calib);
  const SvmModel model = load_model(model_path(w.cfg));
  SequenceRunner runner(w.cfg, seq);
  const fixture::SceneSpec spec = light_spec();
  int box_cells = 0, red_box_cells = 0;
  for (int f = 5; f <= 9; ++f) {
    auto r = runner.extract(f);
    REQUIRE(r);
    runner.pipeline().classify(*r, model);
    const LabelGridFile manual = label_grid_from(r->grid, LabelLayer::kFiltered);
    const std::string stem = std::to_string(1000000 + f).substr(1);
    const LabelGridFile file = read_label_grid(pred_dir(w.cfg) / (stem + ".grid"));
    CHECK(file.labels == manual.labels);
    const RgbImage raster = read_image(pred_dir(w.cfg) / (stem + ".png"));
    const RgbImage expect = render_label_raster(file);
    CHECK(raster.width == expect.width);
    CHECK(raster.pixels == expect.pixels);

    for (const Cell& c : r->grid.cells) {
      if (!c.predictable()) {
        CHECK(c.filtered_label == Label::kUnknown);
        continue;
      }
      const Eigen::Vector2d mn = r->grid.cell_min(c.row, c.col);
      const double cx = mn.x() + 0.2, cy = mn.y() + 0.2;
      for (const auto& b : spec.boxes) {
        if (cx > b.min.x() && cx < b.max.x() && cy > b.min.y() && cy < b.max.y()) {
          ++box_cells;
          red_box_cells += c.filtered_label == Label::kNonTraversable;
        }
      }
    }
  }
  CHECK(box_cells > 0);
  CHECK(red_box_cells * 4 >= box_cells * 3);
}

TEST_CASE("flat road is almost all traversable") {
  Workspace& w = workspace();
  const fs::path dir = w.dir / "flat";
  fixture::SceneSpec spec = light_spec();
  spec.with_grass = false;
  spec.with_boxes = false;
  fixture::write_sequence(dir / "data", spec);
  PipelineConfig cfg = fixture::fixture_config(dir / "data", dir / "out");
  cfg.feature_mode = FeatureMode::kGeometricOnly;
  CHECK(cmd_extract_gt(cfg, cfg.test_frames) == 5);
  for (int f = 5; f <= 9; ++f) {
    const LabelGridFile gt = read_label_grid(gt_dir(cfg) / (std::to_string(1000000 + f).substr(1) + ".grid"));
    for (Label l : gt.labels) CHECK(l != Label::kNonTraversable);
  }
  CHECK(cmd_predict(cfg, cfg.test_frames, model_path(w.cfg)) == 5);
  const EvalReport rep = cmd_evaluate(cfg, cfg.test_frames);
  const auto white = rep.counts.tp, predicted = rep.counts.tp + rep.counts.fn;
  REQUIRE(predicted > 0);
  CHECK(static_cast<double>(white) >= 0.99 * static_cast<double>(predicted));
}

TEST_CASE("evaluate a perfect run and its report files") {
  Workspace& w = workspace();
  PipelineConfig cfg = w.cfg;
  cfg.output_dir = w.dir / "perfect";
  CHECK(cmd_extract_gt(cfg, cfg.test_frames) == 5);
  fs::create_directories(pred_dir(cfg));
  for (const auto& e : fs::directory_iterator(gt_dir(cfg))) fs::copy(e.path(), pred_dir(cfg) / e.path().filename());
  const EvalReport r = cmd_evaluate(cfg, cfg.test_frames);
  CHECK(r.per_frame.size() == 5);
  CHECK(*r.metrics.accuracy == 1.0);
  CHECK(r.counts.unk == 0);
  const EvalReport back = parse_report_csv(slurp(cfg.output_dir / "eval_report.csv"));
  CHECK(back.counts == r.counts);
  const std::string table = slurp(cfg.output_dir / "eval_report.txt");
  for (const char* col : {"TPR", "FNR", "TNR", "FPR", "Acc", "IoU", "F1"}) CHECK(table.find(col) != std::string::npos);

  fs::remove(pred_dir(cfg) / "000007.grid");
  CHECK_THROWS_AS(cmd_evaluate(cfg, cfg.test_frames), DataError);
}

TEST_CASE("bench reports every stage") {
  Workspace& w = workspace();
  PipelineConfig cfg = w.cfg;
  cfg.parallel = true;
  const BenchReport r = cmd_bench(cfg, w.cfg.test_frames, model_path(w.cfg));
  std::set<std::string> stages;
  double parts = 0.0, total = 0.0;
  for (const auto& s : r.serial) {
    stages.insert(s.stage);
    if (s.stage == kStageTotal)
      total = s.mean_ms;
    else if (s.stage != kStageLoad)
      parts += s.mean_ms;
  }
  for (const char* s : {kStageLoad, kStageIntegration, kStageGrid, kStageGeometry, kStagePrediction, kStageFilter,
                        kStageTotal})
    CHECK(stages.count(s) == 1);
  CHECK(parts <= total + 1e-6);
  CHECK(total - parts < 0.1 * total + 1.0);
  CHECK_FALSE(r.parallel.empty());
  CHECK(r.within_budget == (r.serial_total_mean_ms < r.budget_ms));
  const std::string text = slurp(w.cfg.output_dir / "bench_report.txt");
  CHECK(text.find("budget 100.0 ms") != std::string::npos);
  CHECK(text.find(r.within_budget ? "PASS" : "FAIL") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  Workspace& w = workspace();
  const fs::path cfg_path = write_config(w.dir / "cli.cfg", w.cfg);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("train") == 2);
  CHECK(run_cli("extract-gt --config " + (w.dir / "absent.cfg").string()) == 2);

  write_file(w.dir / "bad.cfg", "no_such_key = 1\n");
  CHECK(run_cli("extract-gt --config " + (w.dir / "bad.cfg").string()) == 2);

  PipelineConfig nodata = w.cfg;
  nodata.dataset_root = w.dir / "nowhere";
  CHECK(run_cli("extract-gt --config " + write_config(w.dir / "nodata.cfg", nodata).string()) == 2);

  PipelineConfig cli_out = w.cfg;
  cli_out.output_dir = w.dir / "cli_out";
  const fs::path cli_cfg = write_config(w.dir / "cli_out.cfg", cli_out);
  CHECK(run_cli("extract-gt --config " + cli_cfg.string() + " --frames 5..6") == 0);
  CHECK(count_files(gt_dir(cli_out)) == 2);
  CHECK(run_cli("predict --config " + cli_cfg.string() + " --frames 5..6 --model " + model_path(w.cfg).string()) ==
        0);
  CHECK(run_cli("evaluate --config " + cli_cfg.string() + " --frames 5..6") == 0);
  CHECK(fs::exists(cli_out.output_dir / "eval_report.csv"));
  CHECK(run_cli("predict --config " + cli_cfg.string() + " --model " + (w.dir / "nomodel.txt").string()) == 3);

  // corrupt a scan in a private copy of the sequence
  const fs::path broken = w.dir / "broken";
  fs::copy(w.cfg.dataset_root, broken, fs::copy_options::recursive);
  write_file(broken / "sequences" / "00" / "velodyne" / "000006.bin", "0123456789");
  PipelineConfig bad_data = cli_out;
  bad_data.dataset_root = broken;
  CHECK(run_cli("extract-gt --config " + write_config(w.dir / "broken.cfg", bad_data).string()) == 3);
  (void)cfg_path;
}
