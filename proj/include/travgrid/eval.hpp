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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "travgrid/grid.hpp"
#include "travgrid/ingest.hpp"

namespace travgrid {

struct GroundTruthConfig {
  /// SemanticKITTI ids: road 40, parking 44, sidewalk 48, other-ground 49, lane-marking 60.
  std::vector<std::uint16_t> traversable_classes{40, 44, 48, 49, 60};
  int min_points = 2;
  int nontrav_threshold = 2;

  bool is_traversable(std::uint16_t cls) const;
  void validate() const;
};

/// Checks the configured traversable ids against a SemanticKITTI label-map
/// YAML (`labels: {id: name}`). Throws DataError on a missing id or a name
/// that differs from the expected class name.
void check_label_map(const std::filesystem::path& yaml_path, const GroundTruthConfig& cfg);

/// Unknown with fewer than min_points labeled points; non-traversable with at
/// least nontrav_threshold non-traversable points; traversable otherwise.
/// Unlabeled points (class 0) never count.
Label cell_ground_truth(const TraversabilityGrid& grid, const Cell& cell, const PointCloud& cloud,
                        const GroundTruthConfig& cfg);
/// Sets gt_label on every cell.
void label_ground_truth(TraversabilityGrid& grid, const PointCloud& cloud, const GroundTruthConfig& cfg);

struct ConfusionCounts {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0, unk = 0;

  std::uint64_t total() const { return tp + tn + fp + fn + unk; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Positive class = traversable. Cells with unknown ground truth are skipped;
/// known ground truth with an unknown prediction counts as UNK.
ConfusionCounts score(std::span<const Label> gt, std::span<const Label> pred);
ConfusionCounts score(const TraversabilityGrid& grid);  // gt_label vs filtered_label

/// nullopt marks an undefined metric (zero denominator).
using Metric = std::optional<double>;

struct Rates {
  Metric tpr, tnr, fpr, fnr;
};

struct Metrics {
  Metric accuracy;
  Metric iou;           // positive class
  Metric iou_negative;  // TN / (TN + FP + FN)
  Metric miou;          // mean of the two class IoUs
  Metric f1;
  Rates rates_over_total;  // each count / TOT
  Rates rates_per_class;   // TPR = TP/(TP+FN), TNR = TN/(TN+FP), ...
};

Metrics metrics(const ConfusionCounts& c);

struct LatencyStats {
  std::string stage;
  std::size_t samples = 0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
  double total_ms = 0.0;
};

/// Accumulates wall-clock samples per named stage, keeping insertion order.
class LatencyRecorder {
 public:
  void record(const std::string& stage, double ms);
  std::vector<LatencyStats> summary() const;
  bool empty() const { return order_.empty(); }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<double>> samples_;
};

/// Wall-clock milliseconds of one call.
template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs `stage(frame)` for frames [0, frames) and returns per-frame timing stats.
LatencyStats measure_latency(const std::string& name, const std::function<void(std::size_t)>& stage,
                             std::size_t frames);

struct FrameEval {
  int frame = 0;
  ConfusionCounts counts;
};

struct EvalReport {
  ConfusionCounts counts;
  Metrics metrics;
  std::vector<FrameEval> per_frame;
  std::vector<LatencyStats> latency;
};

EvalReport make_report(std::vector<FrameEval> frames, std::vector<LatencyStats> latency = {});

/// Human-readable table with the Acc / mIoU / F1 / FPR / TPR / FNR / TNR / latency columns.
std::string format_report_table(const EvalReport& report);
/// Delimited copy: one row per frame plus a "total" row, then latency rows.
std::string format_report_csv(const EvalReport& report);
EvalReport parse_report_csv(const std::string& text);

std::string format_metric(const Metric& m, int precision = 4);

}  // namespace travgrid
