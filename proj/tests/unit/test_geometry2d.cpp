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

#include <random>

#include "doctest.h"
#include "travgrid/geometry2d.hpp"

using namespace travgrid;

TEST_CASE("convex hull") {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    area += a.x() * b.y() - a.y() * b.x();
  }
  CHECK(area / 2.0 == doctest::Approx(1.0));  // counter-clockwise
  CHECK(convex_hull(std::vector<Point2>{}).empty());
  CHECK(convex_hull(std::vector<Point2>{{2, 3}}).size() == 1);
  CHECK(convex_hull(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}}).size() == 2);
}

TEST_CASE("hull diameter equals the brute-force maximum") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<Point2> pts;
    for (int i = 0; i < 1 + t % 60; ++i) pts.emplace_back(u(rng), u(rng));
    if (t % 7 == 0) pts.assign(pts.size(), pts.front());
    double want = 0.0;
    for (const auto& a : pts)
      for (const auto& b : pts) want = std::max(want, (a - b).norm());
    CHECK(max_pairwise_distance(pts) == doctest::Approx(want).epsilon(1e-12));
  }
}
