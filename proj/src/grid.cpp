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

#include "travgrid/grid.hpp"

#include <cmath>
#include <string>

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

bool is_integer_ratio(double num, double den, int* out) {
  const double q = num / den;
  const double rq = std::round(q);
  if (rq < 1.0 || std::abs(q - rq) > 1e-9 * std::max(1.0, rq)) return false;
  *out = static_cast<int>(rq);
  return true;
}

}  // namespace

void GridConfig::validate() const {
  int tmp = 0;
  if (!(resolution > 0.0)) throw ConfigError("resolution must be > 0");
  if (!(internal_resolution > 0.0)) throw ConfigError("internal_resolution must be > 0");
  if (!(max_range > 0.0)) throw ConfigError("max_range must be > 0");
  if (!is_integer_ratio(resolution, internal_resolution, &tmp))
    throw ConfigError("resolution / internal_resolution must be a positive integer");
  if (!is_integer_ratio(max_range, resolution, &tmp))
    throw ConfigError("max_range / resolution must be a positive integer");
  if (min_points < 1) throw ConfigError("min_points must be >= 1");
  if (integration_count < 1) throw ConfigError("integration_count must be >= 1");
  if (curvity_bins < 2) throw ConfigError("curvity_bins must be >= 2");
  if (h_buckets < 1 || s_buckets < 1 || v_buckets < 1) throw ConfigError("HSV bucket counts must be >= 1");
  if (filter_weight < 1) throw ConfigError("filter_weight must be >= 1");
}

int GridConfig::cells_per_side() const {
  return static_cast<int>(std::lround(max_range / resolution));
}

int GridConfig::internal_subdivisions() const {
  return static_cast<int>(std::lround(resolution / internal_resolution));
}

std::pair<std::int64_t, std::int64_t> TraversabilityGrid::world_key(int row, int col) const {
  // Cell centres avoid ambiguity when the origin is not on the lattice.
  const Eigen::Vector2d c = cell_min(row, col) + Eigen::Vector2d::Constant(0.5 * resolution);
  return {static_cast<std::int64_t>(std::floor(c.x() / resolution)),
          static_cast<std::int64_t>(std::floor(c.y() / resolution))};
}

std::optional<PointCloud> integrate(std::span<const PointCloud> clouds, std::span<const Pose> poses, int n) {
  if (clouds.size() != poses.size())
    throw PreconditionError("integrate: " + std::to_string(clouds.size()) + " clouds but " +
                            std::to_string(poses.size()) + " poses");
  if (n < 1) throw PreconditionError("integrate: n must be >= 1");
  if (clouds.size() < static_cast<std::size_t>(n)) return std::nullopt;

  const std::size_t first = clouds.size() - static_cast<std::size_t>(n);
  std::size_t total = 0;
  for (std::size_t i = first; i < clouds.size(); ++i) {
    if (clouds[i].frame != Frame::kLidar) throw PreconditionError("integrate: clouds must be in the LiDAR frame");
    total += clouds[i].size();
  }
  PointCloud out;
  out.frame = Frame::kWorld;
  out.scan_index = clouds.back().scan_index;
  out.points.reserve(total);
  for (std::size_t i = first; i < clouds.size(); ++i) {
    const Pose& pose = poses[i];
    for (const LabeledPoint& p : clouds[i].points) {
      LabeledPoint q = p;
      const Eigen::Vector3d w = pose.apply(p.position());
      q.x = w.x();
      q.y = w.y();
      q.z = w.z();
      out.points.push_back(q);
    }
  }
  return out;
}

Eigen::Vector2d snap_to_lattice(const Eigen::Vector2d& xy, double resolution) {
  return {std::round(xy.x() / resolution) * resolution, std::round(xy.y() / resolution) * resolution};
}

TraversabilityGrid build_grid(const PointCloud& cloud, const Eigen::Vector2d& center, const GridConfig& cfg) {
  const double half = 0.5 * cfg.max_range;
  return build_grid_at(cloud, center - Eigen::Vector2d(half, half), cfg);
}

TraversabilityGrid build_grid_at(const PointCloud& cloud, const Eigen::Vector2d& origin, const GridConfig& cfg) {
  if (cloud.frame != Frame::kWorld) throw PreconditionError("build_grid: cloud must be in the world frame");
  cfg.validate();
  TraversabilityGrid grid;
  grid.side = cfg.cells_per_side();
  grid.resolution = cfg.resolution;
  grid.origin_x = origin.x();
  grid.origin_y = origin.y();
  grid.frame_index = cloud.scan_index;
  const std::size_t ncell = static_cast<std::size_t>(grid.side) * static_cast<std::size_t>(grid.side);
  grid.cells.resize(ncell);

  // floor((v - o) / r), nudged so cell edges agree bit-for-bit with o + k * r (cell_min).
  const double r = cfg.resolution;
  auto coord = [r](double v, double o) {
    double k = std::floor((v - o) / r);
    if (o + (k + 1.0) * r <= v)
      k += 1.0;
    else if (o + k * r > v)
      k -= 1.0;
    return k;
  };

  // Counting sort: cell id per point, then prefix sums.
  std::vector<std::int32_t> cell_of(cloud.size(), -1);
  std::vector<std::uint32_t> counts(ncell, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const LabeledPoint& p = cloud.points[i];
    const double fc = coord(p.x, grid.origin_x);
    const double fr = coord(p.y, grid.origin_y);
    if (fc < 0 || fr < 0 || fc >= grid.side || fr >= grid.side) {
      ++grid.dropped;
      continue;
    }
    const auto id = grid.index(static_cast<int>(fr), static_cast<int>(fc));
    cell_of[i] = static_cast<std::int32_t>(id);
    ++counts[id];
  }
  std::uint32_t offset = 0;
  for (int row = 0; row < grid.side; ++row) {
    for (int col = 0; col < grid.side; ++col) {
      Cell& c = grid.at(row, col);
      c.row = row;
      c.col = col;
      c.first = offset;
      c.count = counts[grid.index(row, col)];
      c.status = c.count >= static_cast<std::uint32_t>(cfg.min_points) ? CellStatus::kPredictable
                                                                         : CellStatus::kUnpredictable;
      offset += c.count;
    }
  }
  grid.point_indices.resize(offset);
  std::vector<std::uint32_t> cursor(ncell);
  for (std::size_t id = 0; id < ncell; ++id) cursor[id] = grid.cells[id].first;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cell_of[i] < 0) continue;
    grid.point_indices[cursor[static_cast<std::size_t>(cell_of[i])]++] = static_cast<std::uint32_t>(i);
  }
  return grid;
}

}  // namespace travgrid
