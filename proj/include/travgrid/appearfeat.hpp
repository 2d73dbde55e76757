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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "travgrid/geometry2d.hpp"
#include "travgrid/grid.hpp"
#include "travgrid/image.hpp"
#include "travgrid/ingest.hpp"

namespace travgrid {

/// Unnormalized per-channel HSV bucket counts.
struct HsvCounts {
  std::vector<std::uint64_t> h, s, v;
  std::uint64_t vote_count = 0;

  HsvCounts() = default;
  HsvCounts(int nh, int ns, int nv) : h(static_cast<std::size_t>(nh)), s(static_cast<std::size_t>(ns)),
                                      v(static_cast<std::size_t>(nv)) {}
  HsvCounts& operator+=(const HsvCounts& rhs);
  friend bool operator==(const HsvCounts&, const HsvCounts&) = default;
};

/// Per-channel histograms normalized by the number of voting pixels;
/// all zeros when nothing voted.
struct HsvHistogram {
  std::vector<double> h, s, v;
  std::uint64_t vote_count = 0;

  /// Concatenated h, s, v bins.
  std::vector<double> flatten() const;
};

HsvHistogram normalize(const HsvCounts& counts);

/// HSV with every channel scaled to [0, 256).
struct Hsv256 {
  double h = 0.0, s = 0.0, v = 0.0;
};
Hsv256 rgb_to_hsv256(Rgb c);

/// floor(value * buckets / 256), clamped to the last bucket.
int hsv_bucket(double value256, int buckets);

using Prism = std::array<Eigen::Vector3d, 8>;

/// Bounding prism of a cell: XY bounding rectangle at min z, height z_diff.
/// Vertex order: bottom counter-clockwise from (xmin, ymin), then top likewise.
Prism cell_prism(std::span<const Eigen::Vector3d> points, double height);
/// Convenience overload computing the height from the points' fitted normal.
Prism cell_prism(std::span<const Eigen::Vector3d> points);

/// Projects a world-frame prism into the camera. Vertices behind the camera
/// are dropped; if no remaining vertex lands inside the image the result is
/// nullopt, otherwise vertices are clamped to the image and the convex hull
/// of the projections is returned.
std::optional<std::vector<Point2>> project_prism(const Prism& prism, const CameraModel& cam,
                                                 const Pose& lidar_to_world);

/// Counts HSV buckets over the pixels covered by a convex image polygon.
HsvCounts hsv_counts(std::span<const Point2> polygon, const RgbImage& img, const GridConfig& cfg);
HsvHistogram hsv_histogram(std::span<const Point2> polygon, const RgbImage& img, const GridConfig& cfg);

struct CellKeyHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept {
    return std::hash<std::int64_t>{}(k.first * 0x9E3779B97F4A7C15LL ^ k.second);
  }
};

/// Accumulated colour evidence keyed by world cell.
struct ColorStore {
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, HsvCounts, CellKeyHash> cells;
};

/// Adds this frame's raw counts (indexed like grid.cells; nullopt = not seen)
/// into the store and returns the normalized accumulated histogram per cell.
std::vector<HsvHistogram> propagate_colors(ColorStore& store, const TraversabilityGrid& grid,
                                           std::span<const std::optional<HsvCounts>> new_counts,
                                           const GridConfig& cfg);

}  // namespace travgrid
