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

#include "travgrid/eval.hpp"
#include "travgrid/grid.hpp"
#include "travgrid/postfilter.hpp"
#include "travgrid/svm.hpp"

namespace travgrid {

/// Inclusive frame index range "A..B".
struct FrameRange {
  int first = 0;
  int last = -1;

  bool empty() const { return last < first; }
  int size() const { return empty() ? 0 : last - first + 1; }
  bool overlaps(const FrameRange& o) const { return !empty() && !o.empty() && first <= o.last && o.first <= last; }
  static FrameRange Parse(const std::string& text);
  std::string str() const;
};

struct PipelineConfig {
  std::filesystem::path dataset_root;
  std::string sequence = "00";
  FrameRange train_frames{0, 49};
  FrameRange test_frames{50, 549};
  std::filesystem::path output_dir = "travgrid_out";
  std::optional<std::filesystem::path> label_map;
  FeatureMode feature_mode = FeatureMode::kHybrid;
  bool parallel = false;
  /// Poses are camera-frame odometry; compose with Tr to get LiDAR->world.
  bool compose_calib = true;
  /// Keep the first processed frame's grid origin instead of re-centring.
  bool fixed_origin = false;
  int color_warmup_frames = 10;
  /// Deterministic subsample of the training table (0 = keep all rows).
  std::size_t max_train_samples = 0;
  std::string raster_format = "png";
  double latency_budget_ms = 100.0;

  GridConfig grid;
  TrainConfig train;
  GroundTruthConfig ground_truth;
  FilterConfig filter;

  /// Checks every sub-config; with `require_paths`, also that dataset_root exists.
  void validate(bool require_paths = true) const;
};

/// Flat "key = value" text, '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError. Missing keys keep their defaults.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Full config in the same format (every key, current values).
std::string format_config(const PipelineConfig& cfg);

}  // namespace travgrid
