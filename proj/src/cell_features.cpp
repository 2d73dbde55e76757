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

#include "travgrid/cell_features.hpp"

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

void gather(const TraversabilityGrid& grid, const Cell& cell, const PointCloud& cloud,
            std::vector<Eigen::Vector3d>& out) {
  out.clear();
  for (std::uint32_t idx : grid.points_of(cell)) out.push_back(cloud.points[idx].position());
}

}  // namespace

std::vector<std::optional<GeomFeatures>> grid_geom_features(const TraversabilityGrid& grid, const PointCloud& cloud,
                                                            const Eigen::Vector3d& sensor_origin,
                                                            const GridConfig& cfg, bool parallel) {
  std::vector<std::optional<GeomFeatures>> out(grid.cell_count());
  const auto n = static_cast<std::ptrdiff_t>(grid.cell_count());
#pragma omp parallel if (parallel)
  {
    std::vector<Eigen::Vector3d> pts;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Cell& c = grid.cells[static_cast<std::size_t>(i)];
      if (!c.predictable() || c.count < 2) continue;
      gather(grid, c, cloud, pts);
      out[static_cast<std::size_t>(i)] = compute_geom_features(pts, grid.cell_min(c.row, c.col), sensor_origin, cfg);
    }
  }
  return out;
}

std::vector<std::optional<HsvCounts>> grid_hsv_counts(const TraversabilityGrid& grid, const PointCloud& cloud,
                                                      std::span<const std::optional<GeomFeatures>> geom,
                                                      const CameraModel& cam, const Pose& lidar_to_world,
                                                      const RgbImage& image, const GridConfig& cfg, bool parallel) {
  if (geom.size() != grid.cell_count()) throw PreconditionError("grid_hsv_counts: geometry per cell expected");
  std::vector<std::optional<HsvCounts>> out(grid.cell_count());
  const auto n = static_cast<std::ptrdiff_t>(grid.cell_count());
#pragma omp parallel if (parallel)
  {
    std::vector<Eigen::Vector3d> pts;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (!geom[k]) continue;
      gather(grid, grid.cells[k], cloud, pts);
      const auto polygon = project_prism(cell_prism(pts, geom[k]->z_diff), cam, lidar_to_world);
      if (!polygon) continue;
      HsvCounts counts = hsv_counts(*polygon, image, cfg);
      if (counts.vote_count > 0) out[k] = std::move(counts);
    }
  }
  return out;
}

FeatureVector assemble_features(const GeomFeatures& geom, const HsvHistogram* colors, FeatureMode mode) {
  const auto g = geom.to_array();
  FeatureVector v(g.begin(), g.end());
  if (mode == FeatureMode::kHybrid) {
    if (!colors) throw PreconditionError("assemble_features: hybrid mode needs a colour histogram");
    const auto c = colors->flatten();
    v.insert(v.end(), c.begin(), c.end());
  }
  return v;
}

void predict_grid(TraversabilityGrid& grid, std::span<const std::optional<FeatureVector>> features,
                  const SvmModel& model, bool parallel) {
  if (features.size() != grid.cell_count()) throw PreconditionError("predict_grid: features per cell expected");
  const auto n = static_cast<std::ptrdiff_t>(grid.cell_count());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    Cell& c = grid.cells[k];
    if (!c.predictable() || !features[k]) {
      c.predicted_label = Label::kUnknown;
      continue;
    }
    c.predicted_label = predict(model, *features[k]).label > 0 ? Label::kTraversable : Label::kNonTraversable;
  }
}

}  // namespace travgrid
