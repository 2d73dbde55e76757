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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "synthetic.hpp"
#include "travgrid/appearfeat.hpp"
#include "travgrid/error.hpp"
#include "travgrid/geomfeat.hpp"
#include "travgrid/pipeline.hpp"

using namespace travgrid;

namespace {

// Pinhole looking down +x of the lidar frame.
CameraModel forward_camera(double f, int w, int h) {
  CameraModel cam;
  cam.projection << f, 0, w / 2.0, 0, 0, f, h / 2.0, 0, 0, 0, 1, 0;
  cam.lidar_to_cam.setZero();
  cam.lidar_to_cam(0, 1) = -1;
  cam.lidar_to_cam(1, 2) = -1;
  cam.lidar_to_cam(2, 0) = 1;
  cam.lidar_to_cam(3, 3) = 1;
  cam.width = w;
  cam.height = h;
  return cam;
}

Prism box_prism(Eigen::Vector3d lo, Eigen::Vector3d hi) {
  return {Eigen::Vector3d{lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
          {lo.x(), hi.y(), lo.z()},                {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
          {hi.x(), hi.y(), hi.z()},                {lo.x(), hi.y(), hi.z()}};
}

bool inside_convex(const std::vector<Point2>& poly, double x, double y) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    if ((b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x()) < -1e-9) return false;
  }
  return true;
}

double channel_sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("rgb to hsv on a 256 scale") {
  const Hsv256 red = rgb_to_hsv256({255, 0, 0});
  CHECK(red.h == 0.0);
  CHECK(red.s == 256.0);
  CHECK(red.v == 256.0);
  const Hsv256 blue = rgb_to_hsv256({0, 0, 255});
  CHECK(blue.h == doctest::Approx(240.0 / 360.0 * 256.0));
  const Hsv256 gray = rgb_to_hsv256({128, 128, 128});
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  const Hsv256 black = rgb_to_hsv256({0, 0, 0});
  CHECK(black.v == 0.0);
  CHECK(black.s == 0.0);
}

TEST_CASE("bucket quantization") {
  CHECK(hsv_bucket(128.0, 32) == 16);
  CHECK(hsv_bucket(0.0, 32) == 0);
  CHECK(hsv_bucket(256.0, 32) == 31);
  CHECK(hsv_bucket(255.999, 48) == 47);
  for (int b : {8, 32, 48})
    for (int v = 0; v < 256; ++v) CHECK(hsv_bucket(v, b) == v * b / 256);
}

TEST_CASE("uniform region fills one bin per channel") {
  GridConfig cfg;
  RgbImage img(20, 20, {255, 0, 0});
  const std::vector<Point2> sq{{2, 2}, {12, 2}, {12, 12}, {2, 12}};
  const HsvHistogram h = hsv_histogram(sq, img, cfg);
  CHECK(h.vote_count == 121);
  CHECK(h.h.size() == 32);
  CHECK(h.s.size() == 8);
  CHECK(h.v.size() == 48);
  CHECK(h.h[0] == 1.0);
  CHECK(h.s[7] == 1.0);
  CHECK(h.v[47] == 1.0);
  CHECK(std::count(h.h.begin(), h.h.end(), 0.0) == 31);
  CHECK(h.flatten().size() == 88);
}

TEST_CASE("half red half blue matches a direct count") {
  GridConfig cfg;
  RgbImage img(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) img.set(x, y, x < 5 ? Rgb{255, 0, 0} : Rgb{0, 0, 255});
  const std::vector<Point2> sq{{0, 0}, {9, 0}, {9, 9}, {0, 9}};
  const HsvHistogram h = hsv_histogram(sq, img, cfg);
  CHECK(h.vote_count == 100);
  const int blue_bin = hsv_bucket(rgb_to_hsv256({0, 0, 255}).h, 32);
  CHECK(blue_bin == 21);
  CHECK(h.h[0] == 0.5);
  CHECK(h.h[static_cast<std::size_t>(blue_bin)] == 0.5);
}

TEST_CASE("empty polygon gives a zero histogram") {
  GridConfig cfg;
  RgbImage img(10, 10, {1, 2, 3});
  const std::vector<Point2> off{{20, 20}, {30, 20}, {30, 30}};
  const HsvHistogram h = hsv_histogram(off, img, cfg);
  CHECK(h.vote_count == 0);
  CHECK(channel_sum(h.h) == 0.0);
  CHECK(channel_sum(h.v) == 0.0);
}

TEST_CASE("histogram channels sum to one on random images") {
  GridConfig cfg;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> px(0, 255);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  RgbImage img(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(px(rng)), static_cast<std::uint8_t>(px(rng)),
                     static_cast<std::uint8_t>(px(rng))});
  for (int t = 0; t < 50; ++t) {
    std::vector<Point2> pts;
    for (int i = 0; i < 6; ++i) pts.emplace_back(u(rng), u(rng));
    const auto hull = convex_hull(pts);
    const HsvHistogram h = hsv_histogram(hull, img, cfg);
    if (h.vote_count == 0) continue;
    CHECK(std::abs(channel_sum(h.h) - 1.0) < 1e-9);
    CHECK(std::abs(channel_sum(h.s) - 1.0) < 1e-9);
    CHECK(std::abs(channel_sum(h.v) - 1.0) < 1e-9);
    for (double b : h.flatten()) {
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
    }
  }
}

TEST_CASE("scanline fill covers exactly the pixels inside the polygon") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 45.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point2> pts;
    for (int i = 0; i < 3 + t % 6; ++i) pts.emplace_back(u(rng), u(rng));
    const auto hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    std::set<std::pair<int, int>> got, want;
    scan_convex_polygon(hull, 40, 40, [&](int x, int y) { got.emplace(x, y); });
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x)
        if (inside_convex(hull, x, y)) want.emplace(x, y);
    CHECK(got == want);
  }
  // boundary pixels are included
  std::set<std::pair<int, int>> edge;
  const std::vector<Point2> sq{{1, 1}, {3, 1}, {3, 3}, {1, 3}};
  scan_convex_polygon(sq, 10, 10, [&](int x, int y) { edge.emplace(x, y); });
  CHECK(edge.size() == 9);
}

TEST_CASE("cell prism") {
  std::vector<Eigen::Vector3d> cube;
  for (int i = 0; i < 8; ++i) cube.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // a cube has isotropic covariance, so its plane normal is arbitrary; height is given along z
  const Prism p = cell_prism(cube, z_diff(cube, Eigen::Vector3d::UnitZ()));
  const Prism want = box_prism({0, 0, 0}, {1, 1, 1});
  for (std::size_t i = 0; i < 8; ++i) CHECK((p[i] - want[i]).norm() < 1e-12);
  std::vector<Eigen::Vector3d> slab;
  for (int i = 0; i < 8; ++i) slab.emplace_back(2.0 * (i & 1), 1.5 * ((i >> 1) & 1), 0.3 + 0.5 * ((i >> 2) & 1));
  const Prism q = cell_prism(slab);
  const Prism want_q = box_prism({0, 0, 0.3}, {2, 1.5, 0.8});
  for (std::size_t i = 0; i < 8; ++i) CHECK((q[i] - want_q[i]).norm() < 1e-12);
  CHECK_THROWS_AS(cell_prism(std::vector<Eigen::Vector3d>{{0, 0, 0}}), PreconditionError);
}

TEST_CASE("prism projection") {
  const CameraModel cam = forward_camera(100.0, 200, 100);
  const Pose id;
  SUBCASE("on the optical axis") {
    const Prism p = box_prism({5.0, -0.3, -0.2}, {5.4, 0.3, 0.2});
    const auto hull = project_prism(p, cam, id);
    REQUIRE(hull);
    // manual pinhole: u = f*(-y)/x + cx, v = f*(-z)/x + cy; the near face bounds the image
    std::set<std::pair<double, double>> near;
    for (double y : {-0.3, 0.3})
      for (double z : {-0.2, 0.2}) near.emplace(100.0 * -y / 5.0 + 100.0, 100.0 * -z / 5.0 + 50.0);
    CHECK(hull->size() == 4);
    for (const Point2& v : *hull) {
      CHECK(v.x() > 0.0);
      CHECK(v.x() < 199.0);
      CHECK(v.y() > 0.0);
      CHECK(v.y() < 99.0);
      bool match = false;
      for (auto [x, y] : near) match = match || (std::abs(v.x() - x) < 1e-9 && std::abs(v.y() - y) < 1e-9);
      CHECK(match);
    }
  }
  SUBCASE("behind the camera") {
    CHECK_FALSE(project_prism(box_prism({-5.4, -0.3, -0.2}, {-5.0, 0.3, 0.2}), cam, id));
  }
  SUBCASE("half outside the right border") {
    // u = 100 - 100*y/5 crosses 199 at y = -4.95
    const auto hull = project_prism(box_prism({5.0, -6.0, -0.2}, {5.4, -4.0, 0.2}), cam, id);
    REQUIRE(hull);
    double xmax = 0.0;
    for (const Point2& v : *hull) xmax = std::max(xmax, v.x());
    CHECK(xmax == 199.0);
  }
  SUBCASE("entirely off image") {
    CHECK_FALSE(project_prism(box_prism({5.0, -30.0, -0.2}, {5.4, -29.0, 0.2}), cam, id));
  }
  SUBCASE("pose moves the world") {
    Pose moved;
    moved.translation = {10.0, 0.0, 0.0};
    const auto a = project_prism(box_prism({5.0, -0.3, -0.2}, {5.4, 0.3, 0.2}), cam, id);
    const auto b = project_prism(box_prism({15.0, -0.3, -0.2}, {15.4, 0.3, 0.2}), cam, moved);
    REQUIRE(a);
    REQUIRE(b);
    REQUIRE(a->size() == b->size());
    for (std::size_t i = 0; i < a->size(); ++i) CHECK(((*a)[i] - (*b)[i]).norm() < 1e-9);
  }
  SUBCASE("image size must be known") {
    CameraModel bare = cam;
    bare.width = 0;
    CHECK_THROWS_AS(project_prism(box_prism({5, 0, 0}, {6, 1, 1}), bare, id), PreconditionError);
  }
}

TEST_CASE("colour propagation accumulates counts") {
  GridConfig cfg;
  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  for (double x : {0.1, 0.2, 4.1, 4.2}) {
    LabeledPoint p;
    p.x = x;
    p.y = 0.1;
    cloud.points.push_back(p);
  }
  const TraversabilityGrid g = build_grid_at(cloud, {0.0, 0.0}, cfg);
  const std::size_t a = g.index(0, 0), b = g.index(0, 10);
  auto counts = [&](int hbin, std::uint64_t votes) {
    HsvCounts c(cfg.h_buckets, cfg.s_buckets, cfg.v_buckets);
    c.h[static_cast<std::size_t>(hbin)] = votes;
    c.s[0] = votes;
    c.v[0] = votes;
    c.vote_count = votes;
    return c;
  };
  ColorStore store;
  std::vector<std::optional<HsvCounts>> f1(g.cell_count()), f2(g.cell_count());
  f1[a] = counts(3, 30);
  f2[a] = counts(5, 10);
  f2[b] = counts(1, 4);
  auto h1 = propagate_colors(store, g, f1, cfg);
  CHECK(h1[a].h[3] == 1.0);
  CHECK(h1[b].vote_count == 0);
  CHECK(channel_sum(h1[b].h) == 0.0);
  auto h2 = propagate_colors(store, g, f2, cfg);
  CHECK(h2[a].vote_count == 40);
  CHECK(h2[a].h[3] == 0.75);
  CHECK(h2[a].h[5] == 0.25);
  CHECK(h2[b].h[1] == 1.0);

  SUBCASE("order does not matter at the count level") {
    ColorStore other;
    propagate_colors(other, g, f2, cfg);
    propagate_colors(other, g, f1, cfg);
    CHECK(other.cells == store.cells);
  }
  SUBCASE("identical frames leave the histogram unchanged") {
    ColorStore s;
    const auto first = propagate_colors(s, g, f1, cfg);
    const auto again = propagate_colors(s, g, f1, cfg);
    CHECK(again[a].h == first[a].h);
    CHECK(again[a].vote_count == 2 * first[a].vote_count);
  }
  SUBCASE("cells are matched by world position") {
    const TraversabilityGrid shifted = build_grid_at(cloud, {-0.8, 0.0}, cfg);
    std::vector<std::optional<HsvCounts>> none(shifted.cell_count());
    const auto h = propagate_colors(store, shifted, none, cfg);
    CHECK(h[shifted.index(0, 2)].vote_count == 40);
    CHECK(h[shifted.index(0, 0)].vote_count == 0);
  }
  SUBCASE("size mismatch") {
    std::vector<std::optional<HsvCounts>> bad(3);
    CHECK_THROWS_AS(propagate_colors(store, g, bad, cfg), PreconditionError);
  }
}

TEST_CASE("colour coverage on the synthetic drive") {
  fixture::SceneSpec spec;
  spec.azimuth_steps = 360;
  const fixture::Scene scene(spec);
  PipelineConfig cfg;
  cfg.grid.integration_count = 1;
  Pipeline pipe(cfg, scene.camera());
  std::size_t previous = 0;
  for (int f = 0; f < spec.frames; ++f) {
    const RgbImage img = scene.image(f);
    auto res = pipe.push(f, FrameInput{scene.scan(f), scene.lidar_pose(f), &img});
    REQUIRE(res);
    const std::size_t stored = pipe.colors().cells.size();
    CHECK(stored >= previous);
    previous = stored;
    std::size_t colored = 0;
    for (const Cell& c : res->grid.cells) {
      const auto it = pipe.colors().cells.find(res->grid.world_key(c.row, c.col));
      if (it != pipe.colors().cells.end() && it->second.vote_count > 0) ++colored;
    }
    const double fraction = static_cast<double>(colored) / static_cast<double>(res->grid.cell_count());
    CHECK(fraction > 0.0);
    CHECK(fraction < 1.0);
  }
  CHECK(previous > 0);
}
