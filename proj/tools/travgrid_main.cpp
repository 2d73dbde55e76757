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

// travgrid command-line front end.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "travgrid/commands.hpp"
#include "travgrid/error.hpp"
#include "travgrid/log.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::string> seq;
  std::optional<std::string> frames;
  std::optional<std::string> model;
  bool geom_only = false;
  bool parallel = false;
  bool verbose = false;
};

void add_common(CLI::App* sub, Common& o, bool with_model) {
  sub->add_option("--config", o.config, "Config file (key = value)")->required();
  sub->add_option("--seq", o.seq, "Sequence id, e.g. 00");
  sub->add_option("--frames", o.frames, "Frame range A..B (inclusive)");
  sub->add_flag("--geom-only", o.geom_only, "Use the 21 geometric features only");
  sub->add_flag("--parallel", o.parallel, "Enable OpenMP in per-cell stages");
  sub->add_flag("-v,--verbose", o.verbose, "Print progress messages");
  if (with_model) sub->add_option("--model", o.model, "Model file (default <output_dir>/model.txt)");
}

travgrid::PipelineConfig make_config(const Common& o) {
  travgrid::PipelineConfig cfg = travgrid::load_config(o.config);
  if (o.seq) cfg.sequence = *o.seq;
  if (o.geom_only) cfg.feature_mode = travgrid::FeatureMode::kGeometricOnly;
  if (o.parallel) {
    cfg.parallel = true;
    cfg.train.parallel = true;
  }
  return cfg;
}

travgrid::FrameRange range_for(const Common& o, const travgrid::FrameRange& fallback) {
  return o.frames ? travgrid::FrameRange::Parse(*o.frames) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR + camera traversability grid classifier"};
  app.require_subcommand(1);
  Common o;
  auto* gt = app.add_subcommand("extract-gt", "Write per-frame ground-truth label grids");
  auto* feat = app.add_subcommand("extract-features", "Write the training feature table");
  auto* train = app.add_subcommand("train", "Grid-search an SVM on the feature table");
  auto* pred = app.add_subcommand("predict", "Classify test frames and write grids + rasters");
  auto* eval = app.add_subcommand("evaluate", "Score predicted grids against ground truth");
  auto* bench = app.add_subcommand("bench", "Per-stage latency against the frame budget");
  for (auto* s : {gt, feat, train, eval}) add_common(s, o, false);
  for (auto* s : {pred, bench}) add_common(s, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (o.verbose) {
    travgrid::set_log_sink([](travgrid::LogLevel level, const std::string& msg) {
      std::cerr << (level == travgrid::LogLevel::kWarning ? "warning: " : "") << msg << '\n';
    });
  }

  try {
    travgrid::PipelineConfig cfg = make_config(o);
    const auto model = o.model ? std::filesystem::path(*o.model) : travgrid::model_path(cfg);
    if (gt->parsed()) {
      const int n = travgrid::cmd_extract_gt(cfg, range_for(o, cfg.test_frames));
      std::cout << "wrote " << n << " ground-truth grids to " << travgrid::gt_dir(cfg).string() << '\n';
    } else if (feat->parsed()) {
      const auto t = travgrid::cmd_extract_features(cfg, range_for(o, cfg.train_frames));
      std::cout << "wrote " << t.rows.size() << " rows x " << t.dim << " features to "
                << travgrid::features_path(cfg).string() << '\n';
    } else if (train->parsed()) {
      const auto r = travgrid::cmd_train(cfg);
      std::cout << "C=" << r.best_c << " gamma=" << r.best_gamma << " cv-accuracy=" << r.best_accuracy
                << " support-vectors=" << r.model.support_vectors.size() << '\n';
    } else if (pred->parsed()) {
      const int n = travgrid::cmd_predict(cfg, range_for(o, cfg.test_frames), model);
      std::cout << "wrote " << n << " predicted grids to " << travgrid::pred_dir(cfg).string() << '\n';
    } else if (eval->parsed()) {
      const auto r = travgrid::cmd_evaluate(cfg, range_for(o, cfg.test_frames));
      std::cout << travgrid::format_report_table(r);
    } else if (bench->parsed()) {
      const auto r = travgrid::cmd_bench(cfg, range_for(o, cfg.test_frames), model);
      std::cout << travgrid::format_bench_report(r);
    }
  } catch (const travgrid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const travgrid::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const travgrid::FormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
