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

#include "travgrid/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <numeric>
#include <random>
#include <sstream>

#include "travgrid/error.hpp"
#include "travgrid/log.hpp"

namespace travgrid {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// LRU cache of rows of Q_ij = y_i y_j K(x_i, x_j).
class QRowCache {
 public:
  QRowCache(std::span<const FeatureVector> x, std::span<const int> y, const Kernel& kernel, std::size_t budget_bytes)
      : x_(x), y_(y), kernel_(kernel), rows_(x.size()), where_(x.size()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const double* row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i].data();
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      std::vector<double>().swap(rows_[victim]);
    }
    std::vector<double>& r = rows_[i];
    r.resize(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) r[k] = y_[i] * y_[k] * kernel_(x_[i], x_[k]);
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return r.data();
  }

 private:
  std::span<const FeatureVector> x_;
  std::span<const int> y_;
  Kernel kernel_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::size_t capacity_ = 2;
};

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& tok, const std::string& what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw FormatError("model: bad number \"" + tok + "\" in " + what);
  return v;
}

double accuracy(const SvmModel& model, std::span<const FeatureVector> scaled, std::span<const int> labels) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const int pred = decision_scaled(model, scaled[i]) >= 0.0 ? 1 : -1;
    ok += pred == labels[i];
  }
  return scaled.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(scaled.size());
}

}  // namespace

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  switch (type) {
    case KernelType::kRbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
      }
      return std::exp(-gamma * d2);
    }
    case KernelType::kLinear:
      return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    case KernelType::kPoly:
      return std::pow(gamma * std::inner_product(a.begin(), a.end(), b.begin(), 0.0) + coef0, degree);
  }
  return 0.0;
}

const char* to_string(FeatureMode m) { return m == FeatureMode::kHybrid ? "hybrid" : "geometric_only"; }

FeatureMode feature_mode_from_string(const std::string& s) {
  if (s == "hybrid") return FeatureMode::kHybrid;
  if (s == "geometric_only" || s == "geom" || s == "geom_only") return FeatureMode::kGeometricOnly;
  throw ConfigError("unknown feature mode \"" + s + "\"");
}

Scaling scale_fit(std::span<const FeatureVector> dataset) {
  if (dataset.empty()) throw PreconditionError("scale_fit: empty dataset");
  Scaling s;
  s.min = dataset.front();
  s.max = dataset.front();
  for (const FeatureVector& v : dataset) {
    if (v.size() != s.min.size()) throw PreconditionError("scale_fit: inconsistent dimensions");
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.min[i] = std::min(s.min[i], v[i]);
      s.max[i] = std::max(s.max[i], v[i]);
    }
  }
  return s;
}

FeatureVector scale_apply(std::span<const double> v, const Scaling& scaling) {
  if (scaling.empty()) return FeatureVector(v.begin(), v.end());
  if (v.size() != scaling.dim())
    throw DataError("feature dimension " + std::to_string(v.size()) + " does not match scaling dimension " +
                    std::to_string(scaling.dim()));
  FeatureVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double range = scaling.max[i] - scaling.min[i];
    out[i] = range > 0.0 ? std::clamp((v[i] - scaling.min[i]) / range, -0.5, 1.5) : 0.0;
  }
  return out;
}

void TrainConfig::validate() const {
  if (c_grid.empty() || gamma_grid.empty()) throw ConfigError("C and gamma grids must be non-empty");
  for (double c : c_grid)
    if (!(c > 0.0)) throw ConfigError("C values must be > 0");
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw ConfigError("gamma values must be > 0");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (!(smo_tolerance > 0.0)) throw ConfigError("smo_tolerance must be > 0");
  if (max_passes < 1) throw ConfigError("max_passes must be >= 1");
  if (!(positive_weight > 0.0) || !(negative_weight > 0.0)) throw ConfigError("class weights must be > 0");
}

TrainResult train_smo(std::span<const FeatureVector> x, std::span<const int> y, double c, const Kernel& kernel,
                      const TrainConfig& cfg) {
  const std::size_t n = x.size();
  if (n != y.size()) throw PreconditionError("train_smo: data/label size mismatch");
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] == 1)
      has_pos = true;
    else if (y[i] == -1)
      has_neg = true;
    else
      throw PreconditionError("train_smo: labels must be +1 or -1");
    for (double v : x[i])
      if (!std::isfinite(v)) throw DataError("train_smo: non-finite feature value");
  }
  if (!has_pos || !has_neg) throw DataError("train_smo: training data must contain both classes");

  std::vector<double> cap(n);
  for (std::size_t i = 0; i < n; ++i) cap[i] = c * (y[i] == 1 ? cfg.positive_weight : cfg.negative_weight);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = kernel(x[i], x[i]);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  QRowCache cache(x, y, kernel, cfg.cache_mb << 20);

  auto objective = [&] {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += alpha[i] * (grad[i] - 1.0);
    return -0.5 * obj;
  };

  TrainResult res;
  const std::size_t max_iter = static_cast<std::size_t>(cfg.max_passes) * std::max<std::size_t>(n, 1);
  double last_obj = 0.0;
  bool optimal = false;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // Maximal violating i, then j by second-order gain.
    double gmax = -kInf;
    std::ptrdiff_t ii = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (alpha[t] < cap[t] && -grad[t] >= gmax) {
          gmax = -grad[t];
          ii = static_cast<std::ptrdiff_t>(t);
        }
      } else if (alpha[t] > 0.0 && grad[t] >= gmax) {
        gmax = grad[t];
        ii = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (ii < 0) {
      optimal = true;
      break;
    }
    const std::size_t i = static_cast<std::size_t>(ii);
    const double* qi = cache.row(i);
    double gmax2 = -kInf, best = kInf;
    std::ptrdiff_t jj = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (alpha[t] > 0.0) {
          const double diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
          if (diff > 0.0) {
            const double quad = qd[i] + qd[t] - 2.0 * y[i] * qi[t];
            const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
            if (obj <= best) {
              best = obj;
              jj = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      } else if (alpha[t] < cap[t]) {
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          const double quad = qd[i] + qd[t] + 2.0 * y[i] * qi[t];
          const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            jj = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < cfg.smo_tolerance || jj < 0) {
      optimal = true;
      break;
    }
    const std::size_t j = static_cast<std::size_t>(jj);
    qi = cache.row(i);  // keep i hot before fetching j
    const double* qj = cache.row(j);

    const double ci = cap[i], cj = cap[j];
    const double old_ai = alpha[i], old_aj = alpha[j];
    double ai = old_ai, aj = old_aj;
    if (y[i] != y[j]) {
      double quad = qd[i] + qd[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > ci - cj) {
        if (ai > ci) {
          ai = ci;
          aj = ci - diff;
        }
      } else if (aj > cj) {
        aj = cj;
        ai = cj + diff;
      }
    } else {
      double quad = qd[i] + qd[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) {
          ai = ci;
          aj = sum - ci;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > cj) {
        if (aj > cj) {
          aj = cj;
          ai = sum - cj;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double dai = ai - old_ai, daj = aj - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;

    if (cfg.track_objective) {
      const double obj = objective();
      if (obj < last_obj - 1e-12 * std::max(1.0, std::abs(last_obj))) res.objective_monotone = false;
      last_obj = obj;
    }
  }
  res.iterations = iter;
  res.converged = optimal;
  if (!optimal)
    log_warn("SMO stopped after " + std::to_string(iter) + " iterations without reaching tolerance; "
             "returning best-so-far model");

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t nfree = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= cap[t]) {
      if (y[t] == -1)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++nfree;
      sum_free += yg;
    }
  }
  const double rho = nfree > 0 ? sum_free / static_cast<double>(nfree) : 0.5 * (ub + lb);

  res.alpha = alpha;
  res.dual_objective = objective();
  res.model.kernel = kernel;
  res.model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      res.model.support_vectors.push_back(x[t]);
      res.model.dual_coeffs.push_back(alpha[t] * y[t]);
    }
  }
  return res;
}

double dual_objective(std::span<const FeatureVector> x, std::span<const int> labels, std::span<const double> alpha,
                      const Kernel& kernel) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < x.size(); ++j) quad += alpha[i] * alpha[j] * labels[i] * labels[j] * kernel(x[i], x[j]);
  }
  return lin - 0.5 * quad;
}

double decision_scaled(const SvmModel& model, std::span<const double> scaled) {
  if (!model.support_vectors.empty() && scaled.size() != model.support_vectors.front().size())
    throw DataError("feature dimension " + std::to_string(scaled.size()) + " does not match model dimension " +
                    std::to_string(model.support_vectors.front().size()));
  double sum = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
    sum += model.dual_coeffs[i] * model.kernel(model.support_vectors[i], scaled);
  return sum;
}

Prediction predict(const SvmModel& model, std::span<const double> raw) {
  const FeatureVector scaled = scale_apply(raw, model.scaling);
  Prediction p;
  p.decision = decision_scaled(model, scaled);
  p.label = p.decision >= 0.0 ? 1 : -1;
  return p;
}

std::vector<Prediction> predict_batch(const SvmModel& model, std::span<const FeatureVector> raw, bool parallel) {
  std::vector<Prediction> out(raw.size());
  const auto n = static_cast<std::ptrdiff_t>(raw.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = predict(model, raw[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  std::vector<int> fold(labels.size(), 0);
  std::mt19937_64 rng(seed);
  for (int cls : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }
  return fold;
}

TrainResult train_scaled(std::span<const FeatureVector> raw, std::span<const int> labels, double c,
                         const Kernel& kernel, const TrainConfig& cfg) {
  const Scaling scaling = scale_fit(raw);
  std::vector<FeatureVector> scaled;
  scaled.reserve(raw.size());
  for (const auto& v : raw) scaled.push_back(scale_apply(v, scaling));
  TrainResult res = train_smo(scaled, labels, c, kernel, cfg);
  res.model.scaling = scaling;
  return res;
}

GridSearchResult grid_search(std::span<const FeatureVector> raw, std::span<const int> labels, const TrainConfig& cfg,
                             FeatureMode mode) {
  cfg.validate();
  if (raw.size() != labels.size()) throw PreconditionError("grid_search: data/label size mismatch");
  const auto npos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t nneg = labels.size() - npos;
  if (npos == 0 || nneg == 0) throw DataError("training data must contain both classes");
  if (npos < static_cast<std::size_t>(cfg.folds) || nneg < static_cast<std::size_t>(cfg.folds))
    throw DataError("each class needs at least " + std::to_string(cfg.folds) + " samples for cross-validation");

  std::vector<double> cs = cfg.c_grid, gs = cfg.gamma_grid;
  std::sort(cs.begin(), cs.end());
  std::sort(gs.begin(), gs.end());
  const std::vector<int> fold = stratified_folds(labels, cfg.folds, cfg.seed);

  const std::size_t ncand = cs.size() * gs.size();
  const std::size_t ntask = ncand * static_cast<std::size_t>(cfg.folds);
  std::vector<double> acc(ntask, 0.0);
  std::vector<char> conv(ntask, 1);
  const auto ntask_signed = static_cast<std::ptrdiff_t>(ntask);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (std::ptrdiff_t task = 0; task < ntask_signed; ++task) {
    const std::size_t t = static_cast<std::size_t>(task);
    const std::size_t cand = t / static_cast<std::size_t>(cfg.folds);
    const int f = static_cast<int>(t % static_cast<std::size_t>(cfg.folds));
    const double c = cs[cand / gs.size()];
    const double g = gs[cand % gs.size()];
    std::vector<FeatureVector> train_x, test_x;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (fold[i] == f) {
        test_x.push_back(raw[i]);
        test_y.push_back(labels[i]);
      } else {
        train_x.push_back(raw[i]);
        train_y.push_back(labels[i]);
      }
    }
    const TrainResult r = train_scaled(train_x, train_y, c, Kernel::Rbf(g), cfg);
    std::vector<FeatureVector> scaled_test;
    scaled_test.reserve(test_x.size());
    for (const auto& v : test_x) scaled_test.push_back(scale_apply(v, r.model.scaling));
    acc[t] = accuracy(r.model, scaled_test, test_y);
    conv[t] = r.converged;
  }

  GridSearchResult out;
  out.best_accuracy = -1.0;
  for (std::size_t cand = 0; cand < ncand; ++cand) {
    CvEntry e;
    e.c = cs[cand / gs.size()];
    e.gamma = gs[cand % gs.size()];
    double sum = 0.0;
    for (int f = 0; f < cfg.folds; ++f) {
      const std::size_t t = cand * static_cast<std::size_t>(cfg.folds) + static_cast<std::size_t>(f);
      e.fold_accuracy.push_back(acc[t]);
      sum += acc[t];
      out.converged = out.converged && conv[t];
    }
    e.mean_accuracy = sum / cfg.folds;
    // Candidates are visited in ascending (C, gamma) order, so strict
    // improvement keeps the smallest pair on ties.
    if (e.mean_accuracy > out.best_accuracy + 1e-12) {
      out.best_accuracy = e.mean_accuracy;
      out.best_c = e.c;
      out.best_gamma = e.gamma;
    }
    out.report.push_back(std::move(e));
  }
  TrainResult final_fit = train_scaled(raw, labels, out.best_c, Kernel::Rbf(out.best_gamma), cfg);
  out.converged = out.converged && final_fit.converged;
  out.model = std::move(final_fit.model);
  out.model.feature_mode = mode;
  return out;
}

std::string serialize_model(const SvmModel& model) {
  if (model.support_vectors.empty()) throw PreconditionError("save_model: model has no support vectors");
  const std::size_t dim = model.dim();
  std::ostringstream out;
  out << "TRAVSVM v1\n";
  out << "feature_mode " << to_string(model.feature_mode) << '\n';
  switch (model.kernel.type) {
    case KernelType::kRbf:
      out << "kernel rbf " << fmt_double(model.kernel.gamma) << '\n';
      break;
    case KernelType::kLinear:
      out << "kernel linear\n";
      break;
    case KernelType::kPoly:
      out << "kernel poly " << model.kernel.degree << ' ' << fmt_double(model.kernel.gamma) << ' '
          << fmt_double(model.kernel.coef0) << '\n';
      break;
  }
  out << "bias " << fmt_double(model.bias) << '\n';
  out << "dim " << dim << '\n';
  out << "scaling " << model.scaling.dim() << '\n';
  for (std::size_t i = 0; i < model.scaling.dim(); ++i)
    out << fmt_double(model.scaling.min[i]) << ' ' << fmt_double(model.scaling.max[i]) << '\n';
  out << "support_vectors " << model.support_vectors.size() << '\n';
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    out << fmt_double(model.dual_coeffs[i]);
    for (double v : model.support_vectors[i]) out << ' ' << fmt_double(v);
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

SvmModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const std::string& what) -> std::vector<std::string> {
    if (!std::getline(in, line)) throw FormatError("model: truncated before " + what);
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    return toks;
  };
  auto expect_key = [&](const std::vector<std::string>& toks, const std::string& key, std::size_t n) {
    if (toks.empty() || toks[0] != key || toks.size() != n)
      throw FormatError("model line " + std::to_string(line_no) + ": expected \"" + key + "\"");
  };
  auto parse_count = [&](const std::string& tok, const std::string& what) {
    const double v = parse_double(tok, what);
    if (v < 0 || v != std::floor(v)) throw FormatError("model: bad count in " + what);
    return static_cast<std::size_t>(v);
  };

  auto toks = next("header");
  if (toks.size() != 2 || toks[0] != "TRAVSVM") throw FormatError("model: missing TRAVSVM header");
  if (toks[1] != "v1") throw FormatError("model: unsupported version " + toks[1]);

  SvmModel m;
  toks = next("feature_mode");
  expect_key(toks, "feature_mode", 2);
  try {
    m.feature_mode = feature_mode_from_string(toks[1]);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model: ") + e.what());
  }

  toks = next("kernel");
  if (toks.size() < 2 || toks[0] != "kernel") throw FormatError("model: expected kernel line");
  if (toks[1] == "rbf" && toks.size() == 3) {
    m.kernel = Kernel::Rbf(parse_double(toks[2], "kernel"));
  } else if (toks[1] == "linear" && toks.size() == 2) {
    m.kernel = Kernel::Linear();
  } else if (toks[1] == "poly" && toks.size() == 5) {
    m.kernel = Kernel::Poly(static_cast<int>(parse_count(toks[2], "kernel")), parse_double(toks[3], "kernel"),
                            parse_double(toks[4], "kernel"));
  } else {
    throw FormatError("model: unknown kernel specification");
  }

  toks = next("bias");
  expect_key(toks, "bias", 2);
  m.bias = parse_double(toks[1], "bias");
  toks = next("dim");
  expect_key(toks, "dim", 2);
  const std::size_t dim = parse_count(toks[1], "dim");
  toks = next("scaling");
  expect_key(toks, "scaling", 2);
  const std::size_t nscale = parse_count(toks[1], "scaling");
  if (nscale != 0 && nscale != dim) throw FormatError("model: scaling block size does not match dim");
  for (std::size_t i = 0; i < nscale; ++i) {
    toks = next("scaling block");
    if (toks.size() != 2) throw FormatError("model line " + std::to_string(line_no) + ": scaling needs min max");
    m.scaling.min.push_back(parse_double(toks[0], "scaling"));
    m.scaling.max.push_back(parse_double(toks[1], "scaling"));
    if (m.scaling.max.back() < m.scaling.min.back()) throw FormatError("model: scaling max < min");
  }
  toks = next("support_vectors");
  expect_key(toks, "support_vectors", 2);
  const std::size_t nsv = parse_count(toks[1], "support_vectors");
  if (nsv == 0) throw FormatError("model: empty support vector block");
  for (std::size_t i = 0; i < nsv; ++i) {
    toks = next("support vector block");
    if (toks.size() != dim + 1)
      throw FormatError("model line " + std::to_string(line_no) + ": support vector has wrong dimension");
    m.dual_coeffs.push_back(parse_double(toks[0], "support vector"));
    FeatureVector v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = parse_double(toks[k + 1], "support vector");
    m.support_vectors.push_back(std::move(v));
  }
  toks = next("end");
  expect_key(toks, "end", 1);
  return m;
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_model(model);
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace travgrid
