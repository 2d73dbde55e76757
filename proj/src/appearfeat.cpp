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

#include "travgrid/appearfeat.hpp"

#include <algorithm>
#include <cmath>

#include "travgrid/error.hpp"
#include "travgrid/geomfeat.hpp"

namespace travgrid {

namespace {

void add_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
  if (dst.size() < src.size()) dst.resize(src.size(), 0);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

std::vector<double> normalized(const std::vector<std::uint64_t>& bins, std::uint64_t votes) {
  std::vector<double> out(bins.size(), 0.0);
  if (votes == 0) return out;
  for (std::size_t i = 0; i < bins.size(); ++i) out[i] = static_cast<double>(bins[i]) / static_cast<double>(votes);
  return out;
}

}  // namespace

HsvCounts& HsvCounts::operator+=(const HsvCounts& rhs) {
  add_into(h, rhs.h);
  add_into(s, rhs.s);
  add_into(v, rhs.v);
  vote_count += rhs.vote_count;
  return *this;
}

std::vector<double> HsvHistogram::flatten() const {
  std::vector<double> out;
  out.reserve(h.size() + s.size() + v.size());
  out.insert(out.end(), h.begin(), h.end());
  out.insert(out.end(), s.begin(), s.end());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

HsvHistogram normalize(const HsvCounts& counts) {
  HsvHistogram hist;
  hist.vote_count = counts.vote_count;
  hist.h = normalized(counts.h, counts.vote_count);
  hist.s = normalized(counts.s, counts.vote_count);
  hist.v = normalized(counts.v, counts.vote_count);
  return hist;
}

Hsv256 rgb_to_hsv256(Rgb c) {
  const double r = c.r, g = c.g, b = c.b;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  double hue_deg = 0.0;
  if (delta > 0.0) {
    if (mx == r)
      hue_deg = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
    else if (mx == g)
      hue_deg = 60.0 * ((b - r) / delta + 2.0);
    else
      hue_deg = 60.0 * ((r - g) / delta + 4.0);
  }
  Hsv256 out;
  out.h = hue_deg / 360.0 * 256.0;
  out.s = mx > 0.0 ? delta / mx * 256.0 : 0.0;
  out.v = mx / 255.0 * 256.0;
  return out;
}

int hsv_bucket(double value256, int buckets) {
  const int b = static_cast<int>(std::floor(value256 * buckets / 256.0));
  return std::clamp(b, 0, buckets - 1);
}

Prism cell_prism(std::span<const Eigen::Vector3d> points, double height) {
  if (points.size() < 2) throw PreconditionError("cell_prism: need at least 2 points");
  double x0 = points[0].x(), x1 = x0, y0 = points[0].y(), y1 = y0, z0 = points[0].z();
  for (const auto& p : points) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
    z0 = std::min(z0, p.z());
  }
  const double z1 = z0 + height;
  return {Eigen::Vector3d{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0},
          Eigen::Vector3d{x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}};
}

Prism cell_prism(std::span<const Eigen::Vector3d> points) {
  const EigenDecomp ed = eigen_decompose(points);
  return cell_prism(points, z_diff(points, ed.v3));
}

std::optional<std::vector<Point2>> project_prism(const Prism& prism, const CameraModel& cam,
                                                 const Pose& lidar_to_world) {
  if (cam.width <= 0 || cam.height <= 0) throw PreconditionError("project_prism: camera image size unset");
  const Pose world_to_lidar = lidar_to_world.inverse();
  const Eigen::Matrix<double, 3, 4> world_to_pixel =
      cam.projection * cam.lidar_to_cam * world_to_lidar.matrix();
  std::vector<Point2> projected;
  projected.reserve(prism.size());
  bool any_inside = false;
  const double w = cam.width, h = cam.height;
  for (const Eigen::Vector3d& v : prism) {
    const Eigen::Vector3d uvw = world_to_pixel * v.homogeneous();
    if (!(uvw.z() > 0.0)) continue;
    Point2 px(uvw.x() / uvw.z(), uvw.y() / uvw.z());
    if (px.x() >= 0.0 && px.x() < w && px.y() >= 0.0 && px.y() < h) any_inside = true;
    px.x() = std::clamp(px.x(), 0.0, w - 1.0);
    px.y() = std::clamp(px.y(), 0.0, h - 1.0);
    projected.push_back(px);
  }
  if (!any_inside) return std::nullopt;
  return convex_hull(projected);
}

HsvCounts hsv_counts(std::span<const Point2> polygon, const RgbImage& img, const GridConfig& cfg) {
  HsvCounts counts(cfg.h_buckets, cfg.s_buckets, cfg.v_buckets);
  scan_convex_polygon(polygon, img.width, img.height, [&](int x, int y) {
    const Hsv256 hsv = rgb_to_hsv256(img.at(x, y));
    ++counts.h[static_cast<std::size_t>(hsv_bucket(hsv.h, cfg.h_buckets))];
    ++counts.s[static_cast<std::size_t>(hsv_bucket(hsv.s, cfg.s_buckets))];
    ++counts.v[static_cast<std::size_t>(hsv_bucket(hsv.v, cfg.v_buckets))];
    ++counts.vote_count;
  });
  return counts;
}

HsvHistogram hsv_histogram(std::span<const Point2> polygon, const RgbImage& img, const GridConfig& cfg) {
  return normalize(hsv_counts(polygon, img, cfg));
}

std::vector<HsvHistogram> propagate_colors(ColorStore& store, const TraversabilityGrid& grid,
                                           std::span<const std::optional<HsvCounts>> new_counts,
                                           const GridConfig& cfg) {
  if (new_counts.size() != grid.cell_count())
    throw PreconditionError("propagate_colors: one entry per grid cell expected");
  const HsvCounts empty(cfg.h_buckets, cfg.s_buckets, cfg.v_buckets);
  std::vector<HsvHistogram> out(grid.cell_count());
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const Cell& c = grid.cells[i];
    const auto key = grid.world_key(c.row, c.col);
    if (new_counts[i] && new_counts[i]->vote_count > 0) {
      auto [it, inserted] = store.cells.try_emplace(key, empty);
      it->second += *new_counts[i];
    }
    const auto it = store.cells.find(key);
    out[i] = normalize(it != store.cells.end() ? it->second : empty);
  }
  return out;
}

}  // namespace travgrid
