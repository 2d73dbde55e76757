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

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "travgrid/error.hpp"
#include "travgrid/geomfeat.hpp"

using namespace travgrid;
using Pts = std::vector<Eigen::Vector3d>;

namespace {

Pts uniform_box(std::mt19937_64& rng, int n, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Pts pts;
  for (int i = 0; i < n; ++i)
    pts.emplace_back(lo.x() + u(rng) * (hi.x() - lo.x()), lo.y() + u(rng) * (hi.y() - lo.y()),
                     lo.z() + u(rng) * (hi.z() - lo.z()));
  return pts;
}

}  // namespace

TEST_CASE("collinear points are purely linear") {
  Pts pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(0.1 * i, 0, 0);
  const auto f = eigen_features(pts, 0.2);
  CHECK(f.linearity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.planarity == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.sphericity == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.point_count == 10);
}

TEST_CASE("planar patch") {
  std::mt19937_64 rng(1);
  const Pts pts = uniform_box(rng, 100, {0, 0, 0.7}, {0.4, 0.4, 0.7});
  const auto f = eigen_features(pts, 0.2);
  CHECK(f.sphericity < 1e-12);
  CHECK(f.angle == doctest::Approx(0.0));
  CHECK(f.roughness < 1e-20);
  CHECK(f.normal.z() == doctest::Approx(1.0));
  CHECK(z_diff(pts, f.normal) == 0.0);
  CHECK(volume(pts, f.normal) == 0.0);
}

TEST_CASE("ball is isotropic") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto ball = [&](int n) {
    Pts pts;
    while (static_cast<int>(pts.size()) < n) {
      Eigen::Vector3d d(g(rng), g(rng), g(rng));
      pts.push_back(d.normalized() * std::cbrt(u(rng)));
    }
    return pts;
  };
  const Pts small = ball(200);
  const auto cov = centered_covariance(small);
  const auto ref = oracle::covariance(oracle::to_arrays(small));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(oracle::close_rel(cov(a, b), ref[a][b], 1e-12, 1e-15));
  const auto fs = eigen_features(small, 0.2);
  const auto ev = oracle::jacobi(ref).values;
  CHECK(oracle::close_rel(fs.sphericity, ev[2] / ev[0]));
  CHECK(oracle::close_rel(fs.anisotropy, (ev[0] - ev[2]) / ev[0]));
  // sampling spread of the extreme eigenvalues at 200 points is ~0.3, so the limit is checked on a dense ball
  const auto f = eigen_features(ball(20000), 0.2);
  CHECK(f.sphericity > 0.85);
  CHECK(f.anisotropy < 0.15);
}

TEST_CASE("coincident points fall back to neutral values") {
  const Pts pts(5, Eigen::Vector3d(1, 2, 3));
  const auto f = eigen_features(pts, 0.2);
  CHECK(f.linearity == 0.0);
  CHECK(f.sphericity == 0.0);
  CHECK(f.curvature == 0.0);
  CHECK(f.eigenentropy == 0.0);
  CHECK(f.angle == 0.0);
  CHECK(f.normal == Eigen::Vector3d::UnitZ());
  CHECK(f.surface_density == doctest::Approx(5.0 / 0.04));  // d_m floored at r_i
  CHECK(std::isfinite(f.omnivariance));
}

TEST_CASE("fewer than two points is a precondition error") {
  const Pts one{{0, 0, 0}};
  CHECK_THROWS_AS(eigen_features(one, 0.2), PreconditionError);
  CHECK_THROWS_AS(z_diff(one, Eigen::Vector3d::UnitZ()), PreconditionError);
  CHECK_THROWS_AS(volume(one, Eigen::Vector3d::UnitZ()), PreconditionError);
}

TEST_CASE("eigen decomposition invariants") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Pts pts = uniform_box(rng, 5 + t % 40, {-1, -1, -1}, {1, 0.5, 0.2});
    const EigenDecomp e = eigen_decompose(pts);
    CHECK(e.lambda1 >= e.lambda2);
    CHECK(e.lambda2 >= e.lambda3);
    CHECK(e.lambda3 >= 0.0);
    CHECK(std::abs(e.v1.dot(e.v2)) < 1e-9);
    CHECK(std::abs(e.v1.dot(e.v3)) < 1e-9);
    CHECK(std::abs(e.v2.dot(e.v3)) < 1e-9);
    CHECK(e.v3.z() >= 0.0);
    const auto ref = oracle::jacobi(oracle::covariance(oracle::to_arrays(pts)));
    CHECK(oracle::close_rel(e.lambda1, ref.values[0]));
    CHECK(oracle::close_rel(e.lambda2, ref.values[1]));
    CHECK(oracle::close_rel(e.lambda3, ref.values[2]));
    const auto f = eigen_features(pts, 0.2);
    CHECK(f.angle >= 0.0);
    CHECK(f.angle <= std::numbers::pi / 2);
    for (double v : {f.linearity, f.planarity, f.sphericity, f.anisotropy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("z_diff") {
  CHECK(z_diff(Pts{{0, 0, 0}, {0, 0, 2}}, Eigen::Vector3d::UnitZ()) == 2.0);
  CHECK(z_diff(Pts{{0, 0, 1}, {3, 1, 1}, {2, 2, 1}}, Eigen::Vector3d::UnitZ()) == 0.0);
  std::mt19937_64 rng(4);
  for (double theta : {0.1, 0.5, 1.0, 1.4}) {
    const Pts pts = uniform_box(rng, 40, {0, 0, 0}, {0.4, 0.4, 0.3});
    const Eigen::Vector3d v(0, std::sin(theta), std::cos(theta));
    CHECK(oracle::close_rel(z_diff(pts, v), oracle::z_diff(oracle::to_arrays(pts), {v.x(), v.y(), v.z()})));
  }
  CHECK_THROWS_AS(z_diff(Pts{{0, 0, 0}, {1, 1, 1}}, Eigen::Vector3d::Zero()), PreconditionError);
}

TEST_CASE("internal density") {
  const Eigen::Vector2d mn(2.0, -1.2);
  const Pts all4{{2.05, -1.15, 0}, {2.25, -1.15, 0}, {2.05, -0.95, 0}, {2.35, -0.85, 0}};
  CHECK(internal_density(all4, mn, 0.4, 0.2) == 1.0);
  const Pts corner{{2.01, -1.19, 0}, {2.12, -1.08, 0}, {2.15, -1.05, 0}};
  CHECK(internal_density(corner, mn, 0.4, 0.2) == 0.25);
  CHECK(internal_density(corner, mn, 0.4, 0.4) == 1.0);
  CHECK(internal_density(corner, mn, 0.4, 0.1) == 2.0 / 16.0);
}

TEST_CASE("curvity") {
  const Eigen::Vector3d origin(0, 0, 0);
  const Pts same{{3, 4, 0}, {0, 5, 0}, {5, 0, 0}};
  CHECK(curvity(same, origin, 160, 12.0) == 159);
  const Pts two{{3, 0, 0}, {7, 0, 0}};
  CHECK(curvity(two, origin, 160, 12.0) == 158);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 12.0 * std::numbers::sqrt2);
  Pts spread;
  for (int i = 0; i < 5000; ++i) spread.emplace_back(u(rng), 0, 0);
  const int empty = curvity(spread, origin, 160, 12.0);
  CHECK(empty <= 2);
  CHECK(empty == oracle::curvity(oracle::to_arrays(spread), {0, 0, 0}, 160, 12.0));
  const Pts far{{100, 0, 0}, {1, 0, 0}};
  CHECK(curvity(far, origin, 160, 12.0) == 158);  // beyond the span lands in the last bin
  CHECK_THROWS_AS(curvity(far, origin, 1, 12.0), PreconditionError);
}

TEST_CASE("volume") {
  Pts cube;
  for (int i = 0; i < 8; ++i) cube.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  CHECK(volume(cube, Eigen::Vector3d::UnitZ()) == doctest::Approx(1.0));
  std::mt19937_64 rng(6);
  const Pts box = uniform_box(rng, 50, {1, 2, 0}, {1.3, 2.2, 0.5});
  const auto ref = oracle::geom_features(oracle::to_arrays(box), 1.0, 2.0, {0, 0, 0}, GridConfig{});
  double xlo = 9, xhi = -9, ylo = 9, yhi = -9, zlo = 9, zhi = -9;
  for (const auto& p : box) {
    xlo = std::min(xlo, p.x());
    xhi = std::max(xhi, p.x());
    ylo = std::min(ylo, p.y());
    yhi = std::max(yhi, p.y());
    zlo = std::min(zlo, p.z());
    zhi = std::max(zhi, p.z());
  }
  CHECK(oracle::close_rel(volume(box, Eigen::Vector3d::UnitZ()), (xhi - xlo) * (yhi - ylo) * (zhi - zlo)));
  CHECK(volume(box, Eigen::Vector3d::UnitZ()) <= 0.3 * 0.2 * 0.5);
  (void)ref;
}

TEST_CASE("full feature block agrees with the direct-summation oracle") {
  GridConfig cfg;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Vector2d mn(-6.0 + 0.4 * (t % 30), -6.0 + 0.4 * ((t * 7) % 30));
    const double sz = 0.01 + 0.5 * u(rng);
    const Pts pts = uniform_box(rng, 4 + t % 47, {mn.x() + 0.001, mn.y() + 0.001, 0.0},
                                {mn.x() + 0.399, mn.y() + 0.25 + 0.14 * u(rng), sz});
    const Eigen::Vector3d sensor(u(rng), u(rng), 1.7);
    const auto got = compute_geom_features(pts, mn, sensor, cfg).to_array();
    const auto want =
        oracle::geom_features(oracle::to_arrays(pts), mn.x(), mn.y(), {sensor.x(), sensor.y(), sensor.z()}, cfg)
            .to_array();
    for (int f = 0; f < kGeomFeatureCount; ++f) {
      INFO("trial " << t << " feature " << f);
      CHECK(oracle::close_rel(got[f], want[f]));
    }
  }
}

TEST_CASE("three coplanar points give near-zero out-of-plane features") {
  const Pts tri{{0.1, 0.1, 0.2}, {0.3, 0.15, 0.25}, {0.2, 0.35, 0.3}};
  const auto f = eigen_features(tri, 0.2);
  CHECK(f.goodness_of_fit < 1e-15);
  CHECK(f.sphericity < 1e-12);
  CHECK(f.omnivariance < 1e-5);
  CHECK(f.unevenness < 1e-12);
}

TEST_CASE("invariance and scale laws") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Pts pts = uniform_box(rng, 10 + t, {0, 0, 0}, {0.4, 0.3, 0.1 + u(rng)});
    const Eigen::Matrix3d rot = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
    const Eigen::Vector3d shift(100 * u(rng), -50 * u(rng), 3 * u(rng));
    const double s = 0.2 + 4 * u(rng);
    Pts r, m, sc;
    for (const auto& p : pts) {
      r.push_back(rot * p);
      m.push_back(p + shift);
      sc.push_back(s * p);
    }
    const auto a = eigen_features(pts, 0.2), b = eigen_features(r, 0.2), c = eigen_features(m, 0.2),
               d = eigen_features(sc, 0.2);
    for (auto [x, y] : {std::pair{a.linearity, b.linearity}, {a.planarity, b.planarity}, {a.sphericity, b.sphericity},
                        {a.omnivariance, b.omnivariance}, {a.anisotropy, b.anisotropy},
                        {a.eigenentropy, b.eigenentropy}, {a.sum_eigen, b.sum_eigen}, {a.curvature, b.curvature}})
      CHECK(oracle::close_rel(x, y));
    const auto aa = a.to_array(), ca = c.to_array();
    for (int i = 0; i < 15; ++i) CHECK(oracle::close_rel(aa[i], ca[i], 1e-9, 1e-10));
    CHECK(oracle::close_rel(d.sum_eigen, s * s * a.sum_eigen));
    CHECK(oracle::close_rel(d.omnivariance, s * s * a.omnivariance));
    CHECK(oracle::close_rel(z_diff(sc, d.normal), s * z_diff(pts, a.normal)));
    CHECK(oracle::close_rel(volume(sc, d.normal), s * s * s * volume(pts, a.normal)));
  }
}
