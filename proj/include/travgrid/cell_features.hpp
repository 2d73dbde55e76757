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

#include <Eigen/Core>

#include "travgrid/appearfeat.hpp"
#include "travgrid/geomfeat.hpp"
#include "travgrid/grid.hpp"
#include "travgrid/image.hpp"
#include "travgrid/ingest.hpp"
#include "travgrid/svm.hpp"

namespace travgrid {

/// Per-cell kernels over a built grid. Each takes `parallel`: false runs the
/// serial reference loop, true splits cells across OpenMP threads. Results
/// are identical either way; every cell is computed independently.

/// Geometric features for predictable cells; nullopt for the rest.
std::vector<std::optional<GeomFeatures>> grid_geom_features(const TraversabilityGrid& grid, const PointCloud& cloud,
                                                            const Eigen::Vector3d& sensor_origin,
                                                            const GridConfig& cfg, bool parallel);

/// Raw HSV counts of each predictable cell's projected prism; nullopt when
/// the prism misses the image.
std::vector<std::optional<HsvCounts>> grid_hsv_counts(const TraversabilityGrid& grid, const PointCloud& cloud,
                                                      std::span<const std::optional<GeomFeatures>> geom,
                                                      const CameraModel& cam, const Pose& lidar_to_world,
                                                      const RgbImage& image, const GridConfig& cfg, bool parallel);

/// 21 geometric values, followed by the 88 (#H + #S + #V) colour bins in hybrid mode.
FeatureVector assemble_features(const GeomFeatures& geom, const HsvHistogram* colors, FeatureMode mode);

/// Writes predicted_label on every predictable cell from `features`
/// (indexed like grid.cells). Unpredictable cells stay unknown.
void predict_grid(TraversabilityGrid& grid, std::span<const std::optional<FeatureVector>> features,
                  const SvmModel& model, bool parallel);

}  // namespace travgrid
