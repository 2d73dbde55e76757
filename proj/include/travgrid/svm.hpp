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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace travgrid {

using FeatureVector = std::vector<double>;

enum class KernelType { kRbf, kLinear, kPoly };

struct Kernel {
  KernelType type = KernelType::kRbf;
  double gamma = 1.0;  // rbf and poly
  int degree = 3;      // poly
  double coef0 = 0.0;  // poly

  static Kernel Rbf(double gamma) { return {KernelType::kRbf, gamma, 3, 0.0}; }
  static Kernel Linear() { return {KernelType::kLinear, 1.0, 1, 0.0}; }
  static Kernel Poly(int degree, double gamma, double coef0) { return {KernelType::kPoly, gamma, degree, coef0}; }

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

enum class FeatureMode { kHybrid, kGeometricOnly };
const char* to_string(FeatureMode m);
FeatureMode feature_mode_from_string(const std::string& s);

/// Per-feature min-max scaling to [0, 1]. Empty = identity.
struct Scaling {
  std::vector<double> min;
  std::vector<double> max;

  bool empty() const { return min.empty(); }
  std::size_t dim() const { return min.size(); }
};

Scaling scale_fit(std::span<const FeatureVector> dataset);
/// (v - min) / (max - min) clipped to [-0.5, 1.5]; constant features map to 0.
FeatureVector scale_apply(std::span<const double> v, const Scaling& scaling);

struct SvmModel {
  Kernel kernel;
  Scaling scaling;
  FeatureMode feature_mode = FeatureMode::kHybrid;
  std::vector<FeatureVector> support_vectors;  // scaled
  std::vector<double> dual_coeffs;             // alpha_i * y_i
  double bias = 0.0;

  std::size_t dim() const { return support_vectors.empty() ? scaling.dim() : support_vectors.front().size(); }
};

struct TrainConfig {
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma_grid{0.01, 0.1, 1.0, 10.0};
  int folds = 5;
  double smo_tolerance = 1e-3;
  /// Iteration cap = max_passes * training size.
  int max_passes = 1000;
  std::uint64_t seed = 42;
  /// Per-class multipliers of C (traversable = +1, non-traversable = -1).
  double positive_weight = 1.0;
  double negative_weight = 1.0;
  std::size_t cache_mb = 256;
  /// Records the dual objective after every update and checks it never drops.
  bool track_objective = false;
  /// Runs grid-search (C, gamma, fold) cells concurrently.
  bool parallel = false;

  void validate() const;
};

struct TrainResult {
  SvmModel model;
  std::vector<double> alpha;  // one per training sample, in [0, C_i]
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  bool objective_monotone = true;
};

/// Soft-margin SVM dual by SMO with second-order working-set selection.
/// `scaled` must already be scaled; labels are +1 / -1. The returned model
/// carries identity scaling.
TrainResult train_smo(std::span<const FeatureVector> scaled, std::span<const int> labels, double c,
                      const Kernel& kernel, const TrainConfig& cfg);

/// sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j), by direct summation.
double dual_objective(std::span<const FeatureVector> x, std::span<const int> labels, std::span<const double> alpha,
                      const Kernel& kernel);

struct Prediction {
  int label = 0;  // +1 traversable, -1 non-traversable
  double decision = 0.0;
};

/// Decision value for an already scaled vector.
double decision_scaled(const SvmModel& model, std::span<const double> scaled);
/// Scales `raw` with the model's scaling and classifies it.
Prediction predict(const SvmModel& model, std::span<const double> raw);
/// Batch prediction; `parallel` splits the vectors over OpenMP threads.
std::vector<Prediction> predict_batch(const SvmModel& model, std::span<const FeatureVector> raw, bool parallel);

struct CvEntry {
  double c = 0.0;
  double gamma = 0.0;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};

struct GridSearchResult {
  SvmModel model;  // winner retrained on the full set, with scaling
  double best_c = 0.0;
  double best_gamma = 0.0;
  double best_accuracy = 0.0;
  bool converged = true;
  std::vector<CvEntry> report;
};

/// Stratified k-fold over c_grid x gamma_grid with an RBF kernel; ties go to
/// the smaller C, then the smaller gamma.
GridSearchResult grid_search(std::span<const FeatureVector> raw, std::span<const int> labels, const TrainConfig& cfg,
                             FeatureMode mode = FeatureMode::kHybrid);

/// Fold id per sample: each class shuffled with `seed` and dealt round-robin.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

/// Fits scaling on `raw`, trains, and attaches the scaling to the model.
TrainResult train_scaled(std::span<const FeatureVector> raw, std::span<const int> labels, double c,
                         const Kernel& kernel, const TrainConfig& cfg);

void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);
std::string serialize_model(const SvmModel& model);
SvmModel parse_model(const std::string& text);

}  // namespace travgrid
