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

#include "travgrid/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "travgrid/dataset.hpp"
#include "travgrid/error.hpp"
#include "travgrid/log.hpp"
#include "travgrid/pipeline.hpp"

namespace travgrid {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

bool check_range(const FrameRange& frames, const KittiSequence& seq, const char* what) {
  if (frames.empty()) {
    log_warn(std::string(what) + ": empty frame range, nothing to do");
    return false;
  }
  if (frames.first < 0 || frames.last >= seq.frame_count())
    throw DataError(std::string(what) + ": frames " + frames.str() + " outside sequence with " +
                    std::to_string(seq.frame_count()) + " frames");
  return true;
}

KittiSequence open_sequence(const PipelineConfig& cfg) {
  cfg.validate(true);
  if (cfg.label_map) check_label_map(*cfg.label_map, cfg.ground_truth);
  return KittiSequence(cfg.dataset_root, cfg.sequence, cfg.compose_calib);
}

std::filesystem::path raster_path(const PipelineConfig& cfg, int frame) {
  return pred_dir(cfg) / (frame_stem(frame) + "." + cfg.raster_format);
}

std::vector<LatencyStats> run_timed(const PipelineConfig& cfg, const KittiSequence& seq, const FrameRange& frames,
                                    const SvmModel& model) {
  SequenceRunner runner(cfg, seq);
  LatencyRecorder rec;
  for (int f = frames.first; f <= frames.last; ++f) {
    auto r = runner.extract(f, &rec);
    if (r) runner.pipeline().classify(*r, model, &rec);
  }
  return rec.summary();
}

}  // namespace

std::filesystem::path gt_dir(const PipelineConfig& cfg) { return cfg.output_dir / "gt"; }
std::filesystem::path pred_dir(const PipelineConfig& cfg) { return cfg.output_dir / "pred"; }
std::filesystem::path features_path(const PipelineConfig& cfg) { return cfg.output_dir / "features.csv"; }
std::filesystem::path model_path(const PipelineConfig& cfg) { return cfg.output_dir / "model.txt"; }
std::filesystem::path cv_report_path(const PipelineConfig& cfg) { return cfg.output_dir / "cv_report.csv"; }
std::filesystem::path latency_path(const PipelineConfig& cfg) { return cfg.output_dir / "latency.csv"; }

int cmd_extract_gt(const PipelineConfig& cfg_in, const FrameRange& frames) {
  KittiSequence seq = open_sequence(cfg_in);
  if (!check_range(frames, seq, "extract-gt")) return 0;
  PipelineConfig cfg = cfg_in;
  cfg.feature_mode = FeatureMode::kGeometricOnly;  // colour does not affect ground truth
  SequenceRunner runner(cfg, seq);
  int written = 0;
  for (int f = frames.first; f <= frames.last; ++f) {
    if (!seq.has_labels(f)) throw DataError("extract-gt: missing labels " + seq.label_path(f).string());
    auto r = runner.extract(f);
    if (!r) {
      log_warn("extract-gt: frame " + std::to_string(f) + " has fewer than n preceding scans, skipped");
      continue;
    }
    write_label_grid(gt_dir(cfg) / (frame_stem(f) + ".grid"), label_grid_from(r->grid, LabelLayer::kGroundTruth));
    ++written;
  }
  log_info("extract-gt: wrote " + std::to_string(written) + " grids to " + gt_dir(cfg).string());
  return written;
}

void subsample_rows(FeatureTable& t, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows == 0 || t.rows.size() <= max_rows) return;
  std::vector<std::size_t> idx(t.rows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(max_rows);
  std::sort(idx.begin(), idx.end());
  FeatureTable out;
  out.mode = t.mode;
  out.dim = t.dim;
  for (std::size_t i : idx) {
    out.rows.push_back(std::move(t.rows[i]));
    out.labels.push_back(t.labels[i]);
  }
  t = std::move(out);
}

FeatureTable cmd_extract_features(const PipelineConfig& cfg, const FrameRange& frames) {
  KittiSequence seq = open_sequence(cfg);
  FeatureTable table;
  table.mode = cfg.feature_mode;
  table.dim = static_cast<std::size_t>(kGeomFeatureCount) +
              (cfg.feature_mode == FeatureMode::kHybrid ? static_cast<std::size_t>(cfg.grid.hsv_bins()) : 0);
  if (check_range(frames, seq, "extract-features")) {
    SequenceRunner runner(cfg, seq);
    for (int f = frames.first; f <= frames.last; ++f) {
      if (!seq.has_labels(f)) throw DataError("extract-features: missing labels " + seq.label_path(f).string());
      auto r = runner.extract(f);
      if (r) Pipeline::labeled_rows(*r, table.rows, table.labels);
    }
  }
  subsample_rows(table, cfg.max_train_samples, cfg.train.seed);
  write_feature_table(features_path(cfg), table);
  log_info("extract-features: " + std::to_string(table.rows.size()) + " rows -> " + features_path(cfg).string());
  return table;
}

GridSearchResult cmd_train(const PipelineConfig& cfg) {
  cfg.validate(false);
  const auto path = features_path(cfg);
  if (!std::filesystem::exists(path)) throw DataError("train: missing training table " + path.string());
  const FeatureTable table = read_feature_table(path);
  if (table.mode != cfg.feature_mode)
    throw ConfigError(std::string("train: table was extracted in ") + to_string(table.mode) + " mode, config says " +
                      to_string(cfg.feature_mode));
  GridSearchResult r = grid_search(table.rows, table.labels, cfg.train, table.mode);
  save_model(model_path(cfg), r.model);
  write_file(cv_report_path(cfg), format_cv_report(r));
  log_info("train: C=" + shortest(r.best_c) + " gamma=" + shortest(r.best_gamma) +
           " cv accuracy=" + shortest(r.best_accuracy));
  return r;
}

int cmd_predict(const PipelineConfig& cfg, const FrameRange& frames, const std::filesystem::path& model_file) {
  KittiSequence seq = open_sequence(cfg);
  const SvmModel model = load_model(model_file);
  if (!check_range(frames, seq, "predict")) return 0;
  SequenceRunner runner(cfg, seq);
  LatencyRecorder rec;
  int written = 0;
  for (int f = frames.first; f <= frames.last; ++f) {
    auto r = runner.extract(f, &rec);
    if (!r) {
      log_warn("predict: frame " + std::to_string(f) + " has fewer than n preceding scans, skipped");
      continue;
    }
    runner.pipeline().classify(*r, model, &rec);
    const LabelGridFile g = label_grid_from(r->grid, LabelLayer::kFiltered);
    write_label_grid(pred_dir(cfg) / (frame_stem(f) + ".grid"), g);
    write_image(raster_path(cfg, f), render_label_raster(g));
    ++written;
  }
  write_file(latency_path(cfg), format_latency_csv(rec.summary()));
  return written;
}

EvalReport cmd_evaluate(const PipelineConfig& cfg, const FrameRange& frames) {
  cfg.validate(false);
  std::vector<FrameEval> per_frame;
  for (int f = frames.first; f <= frames.last; ++f) {
    const auto gp = gt_dir(cfg) / (frame_stem(f) + ".grid");
    const auto pp = pred_dir(cfg) / (frame_stem(f) + ".grid");
    const bool have_gt = std::filesystem::exists(gp), have_pred = std::filesystem::exists(pp);
    if (!have_gt && !have_pred) continue;  // lead-in frame without a grid
    if (!have_gt) throw DataError("evaluate: missing " + gp.string());
    if (!have_pred) throw DataError("evaluate: missing " + pp.string());
    const LabelGridFile gt = read_label_grid(gp), pred = read_label_grid(pp);
    if (gt.side != pred.side) throw DataError("evaluate: grid size mismatch at frame " + std::to_string(f));
    per_frame.push_back({f, score(gt.labels, pred.labels)});
  }
  if (per_frame.empty()) log_warn("evaluate: no frames with both ground truth and predictions");
  std::vector<LatencyStats> latency;
  if (std::filesystem::exists(latency_path(cfg))) latency = parse_latency_csv(read_file(latency_path(cfg)));
  EvalReport report = make_report(std::move(per_frame), std::move(latency));
  write_file(cfg.output_dir / "eval_report.txt", format_report_table(report));
  write_file(cfg.output_dir / "eval_report.csv", format_report_csv(report));
  return report;
}

BenchReport cmd_bench(const PipelineConfig& cfg, const FrameRange& frames, const std::filesystem::path& model_file) {
  KittiSequence seq = open_sequence(cfg);
  const SvmModel model = load_model(model_file);
  BenchReport r;
  r.budget_ms = cfg.latency_budget_ms;
  if (!check_range(frames, seq, "bench")) return r;
  PipelineConfig serial = cfg;
  serial.parallel = false;
  r.serial = run_timed(serial, seq, frames, model);
  if (cfg.parallel) r.parallel = run_timed(cfg, seq, frames, model);
  for (const auto& s : r.serial) {
    if (s.stage == kStageTotal) {
      r.serial_total_mean_ms = s.mean_ms;
      r.serial_total_max_ms = s.max_ms;
      r.within_budget = s.samples > 0 && s.mean_ms < r.budget_ms;
    }
  }
  write_file(cfg.output_dir / "bench_report.txt", format_bench_report(r));
  return r;
}

std::string format_bench_report(const BenchReport& r) {
  std::ostringstream out;
  char line[160];
  auto table = [&](const char* title, const std::vector<LatencyStats>& stats) {
    out << title << '\n';
    std::snprintf(line, sizeof(line), "  %-22s %8s %10s %10s\n", "stage", "frames", "mean_ms", "max_ms");
    out << line;
    for (const auto& s : stats) {
      std::snprintf(line, sizeof(line), "  %-22s %8zu %10.3f %10.3f\n", s.stage.c_str(), s.samples, s.mean_ms,
                    s.max_ms);
      out << line;
    }
  };
  table("single-threaded", r.serial);
  if (!r.parallel.empty()) table("parallel", r.parallel);
  std::snprintf(line, sizeof(line), "budget %.1f ms: mean total %.3f ms, max %.3f ms -> %s\n", r.budget_ms,
                r.serial_total_mean_ms, r.serial_total_max_ms, r.within_budget ? "PASS" : "FAIL");
  out << line;
  return out.str();
}

std::string format_latency_csv(const std::vector<LatencyStats>& stats) {
  std::string out = "stage,samples,mean_ms,max_ms,total_ms\n";
  for (const auto& s : stats)
    out += s.stage + ',' + std::to_string(s.samples) + ',' + shortest(s.mean_ms) + ',' + shortest(s.max_ms) + ',' +
           shortest(s.total_ms) + '\n';
  return out;
}

std::vector<LatencyStats> parse_latency_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "stage,samples,mean_ms,max_ms,total_ms")
    throw FormatError("latency csv: missing header");
  std::vector<LatencyStats> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[5];
    for (auto& x : f)
      if (!std::getline(ls, x, ',')) throw FormatError("latency csv: short row \"" + line + "\"");
    LatencyStats s;
    s.stage = f[0];
    try {
      s.samples = std::stoul(f[1]);
      s.mean_ms = std::stod(f[2]);
      s.max_ms = std::stod(f[3]);
      s.total_ms = std::stod(f[4]);
    } catch (const std::exception&) {
      throw FormatError("latency csv: bad number in \"" + line + "\"");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace travgrid
