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

#include "travgrid/pipeline.hpp"

#include <algorithm>

#include "travgrid/cell_features.hpp"
#include "travgrid/error.hpp"
#include "travgrid/postfilter.hpp"

namespace travgrid {

namespace {

void record(LatencyRecorder* rec, const char* stage, double ms) {
  if (rec) rec->record(stage, ms);
}

}  // namespace

Pipeline::Pipeline(const PipelineConfig& cfg, CameraModel camera) : cfg_(cfg), camera_(std::move(camera)) {
  cfg_.grid.validate();
}

void Pipeline::reset() {
  clouds_.clear();
  poses_.clear();
  colors_.cells.clear();
  fixed_origin_.reset();
}

std::optional<FrameResult> Pipeline::push(int frame, FrameInput input, LatencyRecorder* rec) {
  const GridConfig& g = cfg_.grid;
  const bool hybrid = cfg_.feature_mode == FeatureMode::kHybrid;
  if (hybrid && (!input.image || !input.image->valid()))
    throw DataError("frame " + std::to_string(frame) + ": hybrid mode needs a camera image");

  input.scan.scan_index = frame;
  clouds_.push_back(std::move(input.scan));
  poses_.push_back(input.lidar_pose);
  const auto n = static_cast<std::size_t>(g.integration_count);
  if (clouds_.size() > n) {
    clouds_.erase(clouds_.begin());
    poses_.erase(poses_.begin());
  }
  if (clouds_.size() < n) return std::nullopt;

  FrameResult r;
  r.frame = frame;
  r.lidar_pose = input.lidar_pose;

  double ms = time_ms([&] { r.cloud = *integrate(clouds_, poses_, g.integration_count); });
  record(rec, kStageIntegration, ms);
  r.extract_ms += ms;

  ms = time_ms([&] {
    const Eigen::Vector2d here = r.lidar_pose.translation.head<2>();
    if (cfg_.fixed_origin) {
      if (!fixed_origin_) fixed_origin_ = snap_to_lattice(here, g.resolution) - Eigen::Vector2d::Constant(0.5 * g.max_range);
      r.grid = build_grid_at(r.cloud, *fixed_origin_, g);
    } else {
      r.grid = build_grid(r.cloud, snap_to_lattice(here, g.resolution), g);
    }
    label_ground_truth(r.grid, r.cloud, cfg_.ground_truth);
  });
  record(rec, kStageGrid, ms);
  r.extract_ms += ms;

  std::vector<std::optional<GeomFeatures>> geom;
  ms = time_ms([&] {
    geom = grid_geom_features(r.grid, r.cloud, r.lidar_pose.translation, g, cfg_.parallel);
  });
  record(rec, kStageGeometry, ms);
  r.extract_ms += ms;

  std::vector<HsvHistogram> colors;
  if (hybrid) {
    ms = time_ms([&] {
      camera_.width = input.image->width;
      camera_.height = input.image->height;
      const auto counts =
          grid_hsv_counts(r.grid, r.cloud, geom, camera_, r.lidar_pose, *input.image, g, cfg_.parallel);
      colors = propagate_colors(colors_, r.grid, counts, g);
    });
    record(rec, kStageAppearance, ms);
    r.extract_ms += ms;
  }

  r.features.resize(r.grid.cell_count());
  for (std::size_t i = 0; i < geom.size(); ++i) {
    if (geom[i]) r.features[i] = assemble_features(*geom[i], hybrid ? &colors[i] : nullptr, cfg_.feature_mode);
  }
  return r;
}

void Pipeline::classify(FrameResult& r, const SvmModel& model, LatencyRecorder* rec) const {
  if (model.feature_mode != cfg_.feature_mode)
    throw ConfigError(std::string("model was trained in ") + to_string(model.feature_mode) + " mode but pipeline runs " +
                      to_string(cfg_.feature_mode));
  const double t_pred = time_ms([&] { predict_grid(r.grid, r.features, model, cfg_.parallel); });
  const double t_filter = time_ms([&] { r.grid = filter_grid(std::move(r.grid), cfg_.filter.w, cfg_.parallel); });
  record(rec, kStagePrediction, t_pred);
  record(rec, kStageFilter, t_filter);
  record(rec, kStageTotal, r.extract_ms + t_pred + t_filter);
}

void Pipeline::labeled_rows(const FrameResult& r, std::vector<FeatureVector>& rows, std::vector<int>& labels) {
  for (std::size_t i = 0; i < r.grid.cell_count(); ++i) {
    const Cell& c = r.grid.cells[i];
    if (!r.features[i] || c.gt_label == Label::kUnknown) continue;
    rows.push_back(*r.features[i]);
    labels.push_back(c.gt_label == Label::kTraversable ? 1 : -1);
  }
}

SequenceRunner::SequenceRunner(const PipelineConfig& cfg, const KittiSequence& seq)
    : seq_(seq), pipeline_(cfg, seq.camera()) {}

void SequenceRunner::seek(int first) {
  pipeline_.reset();
  const PipelineConfig& cfg = pipeline_.config();
  const int lead = cfg.grid.integration_count - 1 +
                   (cfg.feature_mode == FeatureMode::kHybrid ? cfg.color_warmup_frames : 0);
  next_ = std::max(0, first - lead);
  while (next_ < first) extract(next_);
}

std::optional<FrameResult> SequenceRunner::extract(int frame, LatencyRecorder* rec) {
  if (frame < 0 || frame >= seq_.frame_count())
    throw DataError("frame " + std::to_string(frame) + " outside sequence (" + std::to_string(seq_.frame_count()) +
                    " frames)");
  if (frame != next_) seek(frame);
  const bool hybrid = pipeline_.config().feature_mode == FeatureMode::kHybrid;
  FrameInput in;
  RgbImage image;
  const double t_load = time_ms([&] {
    in.scan = seq_.load_scan(frame);
    in.lidar_pose = seq_.lidar_pose(frame);
    if (hybrid) image = seq_.load_image(frame);
  });
  if (rec) rec->record(kStageLoad, t_load);
  in.image = hybrid ? &image : nullptr;
  next_ = frame + 1;
  return pipeline_.push(frame, std::move(in), rec);
}

}  // namespace travgrid
