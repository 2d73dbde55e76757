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

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "travgrid/ingest.hpp"

namespace travgrid {

/// Grid and feature parameters. Defaults are the reference parameter set
/// (12 m range, 0.4 m cells, 0.2 m sub-cells, 2 points, 3 scans, 160 curvity
/// bins, 32/8/48 HSV buckets, centre weight 3).
struct GridConfig {
  double max_range = 12.0;
  double resolution = 0.4;
  double internal_resolution = 0.2;
  int min_points = 2;
  int integration_count = 3;
  int curvity_bins = 160;
  int h_buckets = 32;
  int s_buckets = 8;
  int v_buckets = 48;
  int filter_weight = 3;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  /// l = max_range / resolution (exact integer after validate()).
  int cells_per_side() const;
  /// resolution / internal_resolution (exact integer after validate()).
  int internal_subdivisions() const;
  int hsv_bins() const { return h_buckets + s_buckets + v_buckets; }
};

enum class CellStatus : std::uint8_t { kUnpredictable, kPredictable };
enum class Label : std::uint8_t { kUnknown, kTraversable, kNonTraversable };

struct Cell {
  int row = 0;
  int col = 0;
  std::uint32_t first = 0;  // offset into TraversabilityGrid::point_indices
  std::uint32_t count = 0;
  CellStatus status = CellStatus::kUnpredictable;
  Label gt_label = Label::kUnknown;
  Label predicted_label = Label::kUnknown;
  Label filtered_label = Label::kUnknown;

  bool predictable() const { return status == CellStatus::kPredictable; }
};

/// World-anchored l x l grid; row indexes y, col indexes x.
/// Point membership is stored CSR-style: each cell owns a contiguous slice of
/// `point_indices`, which index into the cloud the grid was built from.
struct TraversabilityGrid {
  int side = 0;  // l
  double resolution = 0.0;
  double origin_x = 0.0;  // world xy of the cell (0, 0) corner
  double origin_y = 0.0;
  int frame_index = 0;
  std::vector<Cell> cells;  // row-major, index = row * side + col
  std::vector<std::uint32_t> point_indices;
  std::size_t dropped = 0;  // points outside the grid

  std::size_t cell_count() const { return cells.size(); }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(side) + static_cast<std::size_t>(col);
  }
  Cell& at(int row, int col) { return cells[index(row, col)]; }
  const Cell& at(int row, int col) const { return cells[index(row, col)]; }
  std::span<const std::uint32_t> points_of(const Cell& c) const {
    return std::span<const std::uint32_t>(point_indices).subspan(c.first, c.count);
  }
  /// World xy of a cell's minimum corner.
  Eigen::Vector2d cell_min(int row, int col) const {
    return {origin_x + col * resolution, origin_y + row * resolution};
  }
  /// Integer world-lattice key of a cell at this grid's resolution.
  std::pair<std::int64_t, std::int64_t> world_key(int row, int col) const;
};

/// Concatenation of the last `n` clouds, each moved to the world frame with
/// its pose. Returns nullopt while fewer than n clouds are available.
std::optional<PointCloud> integrate(std::span<const PointCloud> clouds, std::span<const Pose> poses,
                                    int n);

/// Rounds each coordinate to the nearest multiple of `resolution`.
Eigen::Vector2d snap_to_lattice(const Eigen::Vector2d& xy, double resolution);

/// Buckets a world-frame cloud into a grid whose minimum corner is
/// center - (max_range/2, max_range/2). Out-of-grid points are dropped.
TraversabilityGrid build_grid(const PointCloud& cloud, const Eigen::Vector2d& center, const GridConfig& cfg);
/// Same, with the minimum corner given directly (fixed-origin mode).
TraversabilityGrid build_grid_at(const PointCloud& cloud, const Eigen::Vector2d& origin, const GridConfig& cfg);

}  // namespace travgrid
