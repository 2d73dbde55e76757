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

#include "travgrid/geomfeat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "travgrid/error.hpp"
#include "travgrid/geometry2d.hpp"

namespace travgrid {

std::array<double, kGeomFeatureCount> GeomFeatures::to_array() const {
  return {linearity,  planarity,       sphericity, omnivariance, anisotropy, eigenentropy,    sum_eigen,
          curvature,  angle,           goodness_of_fit, roughness, normal.x(), normal.y(),   normal.z(),
          unevenness, surface_density, z_diff,     internal_density, curvity, volume,        point_count};
}

Eigen::Matrix3d centered_covariance(std::span<const Eigen::Vector3d> points) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  return cov / static_cast<double>(points.size());
}

EigenDecomp eigen_decompose(std::span<const Eigen::Vector3d> points) {
  const Eigen::Matrix3d cov = centered_covariance(points);
  EigenDecomp ed;
  if (cov.cwiseAbs().maxCoeff() == 0.0) return ed;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const auto& vals = solver.eigenvalues();  // ascending
  const auto& vecs = solver.eigenvectors();
  ed.lambda1 = std::max(0.0, vals(2));
  ed.lambda2 = std::max(0.0, vals(1));
  ed.lambda3 = std::max(0.0, vals(0));
  ed.v1 = vecs.col(2);
  ed.v2 = vecs.col(1);
  ed.v3 = vecs.col(0);
  if (ed.v3.z() < 0.0) ed.v3 = -ed.v3;
  return ed;
}

GeomFeatures eigen_features(std::span<const Eigen::Vector3d> points, double internal_resolution) {
  if (points.size() < 2) throw PreconditionError("eigen_features: need at least 2 points");
  const double k = static_cast<double>(points.size());
  const EigenDecomp ed = eigen_decompose(points);
  const double l1 = ed.lambda1, l2 = ed.lambda2, l3 = ed.lambda3;
  const double sum = l1 + l2 + l3;

  GeomFeatures f;
  f.point_count = k;
  f.sum_eigen = sum;
  f.omnivariance = std::cbrt(l1 * l2 * l3);
  f.goodness_of_fit = l3;
  if (l1 > 0.0) {
    f.linearity = (l1 - l2) / l1;
    f.planarity = (l2 - l3) / l1;
    f.sphericity = l3 / l1;
    f.anisotropy = (l1 - l3) / l1;
    f.curvature = l3 / sum;
    for (double l : {l1, l2, l3}) {
      const double e = l / sum;
      if (e > 0.0) f.eigenentropy -= e * std::log(e);
    }
    f.normal = ed.v3;
    f.angle = std::acos(std::clamp(ed.v3.z(), 0.0, 1.0));
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= k;
  double var_z = 0.0, residual = 0.0;
  for (const auto& p : points) {
    var_z += (p.z() - mean.z()) * (p.z() - mean.z());
    residual += std::abs((p - mean).dot(f.normal));
  }
  f.roughness = var_z / k;
  f.unevenness = residual / k;

  std::vector<Point2> xy;
  xy.reserve(points.size());
  for (const auto& p : points) xy.emplace_back(p.x(), p.y());
  const double dm = std::max(max_pairwise_distance(xy), internal_resolution);
  f.surface_density = k / (dm * dm);
  return f;
}

double z_diff(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& plane_normal) {
  if (points.size() < 2) throw PreconditionError("z_diff: need at least 2 points");
  if (plane_normal.squaredNorm() == 0.0) throw PreconditionError("z_diff: zero normal");
  std::size_t imax = 0, imin = 0;
  double tmax = plane_normal.dot(points[0]), tmin = tmax;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double t = plane_normal.dot(points[i]);
    if (t > tmax) {
      tmax = t;
      imax = i;
    }
    if (t < tmin) {
      tmin = t;
      imin = i;
    }
  }
  return std::abs(points[imax].z() - points[imin].z());
}

double internal_density(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d& cell_min,
                        double resolution, double internal_resolution) {
  const int s = static_cast<int>(std::lround(resolution / internal_resolution));
  if (s < 1) throw PreconditionError("internal_density: r / r_i must be >= 1");
  std::vector<char> occupied(static_cast<std::size_t>(s * s), 0);
  int filled = 0;
  for (const auto& p : points) {
    const int cx = std::clamp(static_cast<int>(std::floor((p.x() - cell_min.x()) / internal_resolution)), 0, s - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((p.y() - cell_min.y()) / internal_resolution)), 0, s - 1);
    char& o = occupied[static_cast<std::size_t>(cy * s + cx)];
    if (!o) {
      o = 1;
      ++filled;
    }
  }
  return static_cast<double>(filled) / static_cast<double>(s * s);
}

int curvity(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& sensor_origin, int n_bins,
            double max_range) {
  if (n_bins < 2) throw PreconditionError("curvity: need at least 2 bins");
  const double width = max_range * std::numbers::sqrt2 / n_bins;
  std::vector<char> used(static_cast<std::size_t>(n_bins), 0);
  int occupied = 0;
  for (const auto& p : points) {
    const double d = (p - sensor_origin).norm();
    const int b = std::min(static_cast<int>(d / width), n_bins - 1);
    if (!used[static_cast<std::size_t>(b)]) {
      used[static_cast<std::size_t>(b)] = 1;
      ++occupied;
    }
  }
  return n_bins - occupied;
}

double volume(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& plane_normal) {
  if (points.size() < 2) throw PreconditionError("volume: need at least 2 points");
  double x0 = points[0].x(), x1 = x0, y0 = points[0].y(), y1 = y0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  return (x1 - x0) * (y1 - y0) * z_diff(points, plane_normal);
}

GeomFeatures compute_geom_features(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d& cell_min,
                                   const Eigen::Vector3d& sensor_origin, const GridConfig& cfg) {
  GeomFeatures f = eigen_features(points, cfg.internal_resolution);
  f.z_diff = z_diff(points, f.normal);
  f.internal_density = internal_density(points, cell_min, cfg.resolution, cfg.internal_resolution);
  f.curvity = curvity(points, sensor_origin, cfg.curvity_bins, cfg.max_range);
  f.volume = volume(points, f.normal);
  return f;
}

}  // namespace travgrid
