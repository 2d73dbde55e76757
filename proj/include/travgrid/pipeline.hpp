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

#include <optional>
#include <vector>

#include "travgrid/appearfeat.hpp"
#include "travgrid/config.hpp"
#include "travgrid/dataset.hpp"
#include "travgrid/eval.hpp"
#include "travgrid/geomfeat.hpp"
#include "travgrid/grid.hpp"
#include "travgrid/svm.hpp"

namespace travgrid {

// Stage names reported by the latency recorder.
inline constexpr const char* kStageLoad = "load";
inline constexpr const char* kStageIntegration = "integration";
inline constexpr const char* kStageGrid = "grid";
inline constexpr const char* kStageGeometry = "geometric_features";
inline constexpr const char* kStageAppearance = "appearance_features";
inline constexpr const char* kStagePrediction = "prediction";
inline constexpr const char* kStageFilter = "filter";
inline constexpr const char* kStageTotal = "total";  // everything except load

struct FrameResult {
  int frame = 0;
  Pose lidar_pose;
  PointCloud cloud;  // integrated, world frame
  TraversabilityGrid grid;  // ground truth filled when labels exist
  std::vector<std::optional<FeatureVector>> features;  // one per cell, set on predictable cells
  double extract_ms = 0.0;
};

/// In-memory inputs of one frame, for callers that do not read from disk.
struct FrameInput {
  PointCloud scan;  // LiDAR frame
  Pose lidar_pose;
  const RgbImage* image = nullptr;  // required in hybrid mode
};

/// Runs integration, grid building and feature extraction frame by frame.
/// Colour state carries across calls, so frames should be fed in order.
class Pipeline {
 public:
  Pipeline(const PipelineConfig& cfg, CameraModel camera);

  /// Nullopt until `integration_count` scans have been pushed.
  std::optional<FrameResult> push(int frame, FrameInput input, LatencyRecorder* rec = nullptr);

  /// Predict + filter; records the two stages and the frame total.
  void classify(FrameResult& result, const SvmModel& model, LatencyRecorder* rec = nullptr) const;

  /// Feature vector of every predictable cell with known ground truth, in (row, col) order.
  static void labeled_rows(const FrameResult& result, std::vector<FeatureVector>& rows, std::vector<int>& labels);

  const ColorStore& colors() const { return colors_; }
  const PipelineConfig& config() const { return cfg_; }
  void reset();

 private:
  PipelineConfig cfg_;
  CameraModel camera_;
  std::vector<PointCloud> clouds_;
  std::vector<Pose> poses_;
  ColorStore colors_;
  std::optional<Eigen::Vector2d> fixed_origin_;
};

/// Drives a Pipeline over a dataset sequence.
class SequenceRunner {
 public:
  SequenceRunner(const PipelineConfig& cfg, const KittiSequence& seq);

  /// Replays colour warm-up and integration lead-in before `first` so the
  /// frame at `first` sees the same state as in a continuous run.
  void seek(int first);
  std::optional<FrameResult> extract(int frame, LatencyRecorder* rec = nullptr);
  Pipeline& pipeline() { return pipeline_; }

 private:
  const KittiSequence& seq_;
  Pipeline pipeline_;
  int next_ = 0;
};

}  // namespace travgrid
