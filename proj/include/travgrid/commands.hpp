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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "travgrid/config.hpp"
#include "travgrid/eval.hpp"
#include "travgrid/svm.hpp"
#include "travgrid/tables.hpp"

namespace travgrid {

// Output layout under PipelineConfig::output_dir.
std::filesystem::path gt_dir(const PipelineConfig& cfg);
std::filesystem::path pred_dir(const PipelineConfig& cfg);
std::filesystem::path features_path(const PipelineConfig& cfg);
std::filesystem::path model_path(const PipelineConfig& cfg);
std::filesystem::path cv_report_path(const PipelineConfig& cfg);
std::filesystem::path latency_path(const PipelineConfig& cfg);

/// Writes gt/<frame>.grid for every frame of `frames`; returns the file count.
int cmd_extract_gt(const PipelineConfig& cfg, const FrameRange& frames);

/// Writes the training table for `frames`, ordered by (frame, row, col).
FeatureTable cmd_extract_features(const PipelineConfig& cfg, const FrameRange& frames);

/// Keeps `max_rows` rows chosen by a seeded shuffle, in their original order.
void subsample_rows(FeatureTable& table, std::size_t max_rows, std::uint64_t seed);

/// Grid search on the training table; writes model.txt and cv_report.csv.
GridSearchResult cmd_train(const PipelineConfig& cfg);

/// Writes pred/<frame>.grid plus a raster per frame and latency.csv; returns the frame count.
int cmd_predict(const PipelineConfig& cfg, const FrameRange& frames, const std::filesystem::path& model_file);

/// Scores pred/ against gt/; writes eval_report.txt and eval_report.csv.
EvalReport cmd_evaluate(const PipelineConfig& cfg, const FrameRange& frames);

struct BenchReport {
  std::vector<LatencyStats> serial;
  std::vector<LatencyStats> parallel;  // empty unless requested
  double budget_ms = 0.0;
  double serial_total_mean_ms = 0.0;
  double serial_total_max_ms = 0.0;
  bool within_budget = false;  // serial mean total below the budget
};

/// Per-stage latency of the full pipeline; single-threaded, plus a parallel run when cfg.parallel.
BenchReport cmd_bench(const PipelineConfig& cfg, const FrameRange& frames, const std::filesystem::path& model_file);
std::string format_bench_report(const BenchReport& r);

std::string format_latency_csv(const std::vector<LatencyStats>& stats);
std::vector<LatencyStats> parse_latency_csv(const std::string& text);

}  // namespace travgrid
