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
#include <span>

#include <Eigen/Core>

#include "travgrid/grid.hpp"

namespace travgrid {

inline constexpr int kGeomFeatureCount = 21;

/// Eigen decomposition of the centred covariance of a point set.
/// lambda1 >= lambda2 >= lambda3 >= 0; v3 is oriented so that v3.z >= 0.
struct EigenDecomp {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Eigen::Vector3d v1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v2 = Eigen::Vector3d::UnitY();
  Eigen::Vector3d v3 = Eigen::Vector3d::UnitZ();
};

struct GeomFeatures {
  // Eigen / plane descriptors.
  double linearity = 0.0;
  double planarity = 0.0;
  double sphericity = 0.0;
  double omnivariance = 0.0;
  double anisotropy = 0.0;
  double eigenentropy = 0.0;
  double sum_eigen = 0.0;
  double curvature = 0.0;
  double angle = 0.0;  // rad, arccos(n . z)
  double goodness_of_fit = 0.0;
  double roughness = 0.0;  // variance of z
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double unevenness = 0.0;       // mean |plane residual|
  double surface_density = 0.0;  // points / m^2
  // Cell-structure descriptors.
  double z_diff = 0.0;
  double internal_density = 0.0;
  double curvity = 0.0;  // empty range-histogram bins
  double volume = 0.0;
  double point_count = 0.0;

  /// Fixed feature order used for the SVM input.
  std::array<double, kGeomFeatureCount> to_array() const;
};

/// Population covariance (1/k) of mean-centred points.
Eigen::Matrix3d centered_covariance(std::span<const Eigen::Vector3d> points);
EigenDecomp eigen_decompose(std::span<const Eigen::Vector3d> points);

/// Fills the eigen/plane part of GeomFeatures (everything up to
/// surface_density, plus point_count). Requires at least 2 points.
/// `internal_resolution` floors the XY diameter used by surface density.
GeomFeatures eigen_features(std::span<const Eigen::Vector3d> points, double internal_resolution);

/// |M.z - m.z| for the points M, m at the extremes of the projection onto
/// the line spanned by `plane_normal`.
double z_diff(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& plane_normal);

/// Fraction of the (r / r_i)^2 sub-cells of the footprint starting at
/// `cell_min` that hold at least one point.
double internal_density(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d& cell_min,
                        double resolution, double internal_resolution);

/// Number of empty bins in an n_bins histogram of sensor distances over
/// [0, max_range * sqrt(2)].
int curvity(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& sensor_origin, int n_bins,
            double max_range);

/// XY bounding-rectangle area times z_diff.
double volume(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& plane_normal);

/// All 21 geometric values for one cell.
GeomFeatures compute_geom_features(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d& cell_min,
                                   const Eigen::Vector3d& sensor_origin, const GridConfig& cfg);

}  // namespace travgrid
