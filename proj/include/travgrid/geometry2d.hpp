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

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace travgrid {

using Point2 = Eigen::Vector2d;

/// Convex hull by monotone chain; counter-clockwise, collinear points removed.
/// Returns the unique points themselves when fewer than three are non-collinear.
std::vector<Point2> convex_hull(std::span<const Point2> points);

/// Largest distance between any two points (hull diameter).
double max_pairwise_distance(std::span<const Point2> points);

/// Calls visit(x, y) for every integer pixel inside or on the boundary of a
/// convex polygon, clipped to [0, width) x [0, height), one scanline at a time.
template <typename Visit>
void scan_convex_polygon(std::span<const Point2> poly, int width, int height, Visit&& visit) {
  if (poly.empty() || width <= 0 || height <= 0) return;
  constexpr double kEps = 1e-9;
  double ymin = poly[0].y(), ymax = poly[0].y();
  for (const Point2& p : poly) {
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const int y0 = std::max(0, static_cast<int>(std::ceil(ymin - kEps)));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(ymax + kEps)));
  const std::size_t n = poly.size();
  for (int y = y0; y <= y1; ++y) {
    double xl = INFINITY, xr = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = poly[i];
      const Point2& b = poly[(i + 1) % n];
      const double lo = std::min(a.y(), b.y()), hi = std::max(a.y(), b.y());
      if (y < lo - kEps || y > hi + kEps) continue;
      if (hi - lo <= kEps) {
        xl = std::min({xl, a.x(), b.x()});
        xr = std::max({xr, a.x(), b.x()});
      } else {
        const double t = std::clamp((y - a.y()) / (b.y() - a.y()), 0.0, 1.0);
        const double x = a.x() + t * (b.x() - a.x());
        xl = std::min(xl, x);
        xr = std::max(xr, x);
      }
    }
    if (xl > xr) continue;
    const int x0 = std::max(0, static_cast<int>(std::ceil(xl - kEps)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(xr + kEps)));
    for (int x = x0; x <= x1; ++x) visit(x, y);
  }
}

}  // namespace travgrid
