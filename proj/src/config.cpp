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

#include "travgrid/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a number, got \"" + v + "\"");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got \"" + v + "\"");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got \"" + v + "\"");
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(key, trim(item)));
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += shortest(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["dataset_root"] = [](PipelineConfig& c, auto&, auto& v) { c.dataset_root = v; };
    t["sequence"] = [](PipelineConfig& c, auto&, auto& v) { c.sequence = v; };
    t["train_frames"] = [](PipelineConfig& c, auto&, auto& v) { c.train_frames = FrameRange::Parse(v); };
    t["test_frames"] = [](PipelineConfig& c, auto&, auto& v) { c.test_frames = FrameRange::Parse(v); };
    t["output_dir"] = [](PipelineConfig& c, auto&, auto& v) { c.output_dir = v; };
    t["label_map"] = [](PipelineConfig& c, auto&, auto& v) {
      if (v.empty())
        c.label_map.reset();
      else
        c.label_map = v;
    };
    t["feature_mode"] = [](PipelineConfig& c, auto&, auto& v) { c.feature_mode = feature_mode_from_string(v); };
    t["parallel"] = [](PipelineConfig& c, auto& k, auto& v) { c.parallel = to_bool(k, v); };
    t["compose_calib"] = [](PipelineConfig& c, auto& k, auto& v) { c.compose_calib = to_bool(k, v); };
    t["fixed_origin"] = [](PipelineConfig& c, auto& k, auto& v) { c.fixed_origin = to_bool(k, v); };
    t["color_warmup_frames"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.color_warmup_frames = static_cast<int>(to_int(k, v));
    };
    t["max_train_samples"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.max_train_samples = static_cast<std::size_t>(to_int(k, v));
    };
    t["raster_format"] = [](PipelineConfig& c, auto&, auto& v) { c.raster_format = v; };
    t["latency_budget_ms"] = [](PipelineConfig& c, auto& k, auto& v) { c.latency_budget_ms = to_double(k, v); };

    t["max_range"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.max_range = to_double(k, v); };
    t["resolution"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.resolution = to_double(k, v); };
    t["internal_resolution"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.grid.internal_resolution = to_double(k, v);
    };
    t["min_points"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.min_points = static_cast<int>(to_int(k, v)); };
    t["integration_count"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.grid.integration_count = static_cast<int>(to_int(k, v));
    };
    t["curvity_bins"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.grid.curvity_bins = static_cast<int>(to_int(k, v));
    };
    t["h_buckets"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.h_buckets = static_cast<int>(to_int(k, v)); };
    t["s_buckets"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.s_buckets = static_cast<int>(to_int(k, v)); };
    t["v_buckets"] = [](PipelineConfig& c, auto& k, auto& v) { c.grid.v_buckets = static_cast<int>(to_int(k, v)); };
    t["filter_weight"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.filter.w = static_cast<int>(to_int(k, v));
      c.grid.filter_weight = c.filter.w;
    };

    t["c_grid"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.c_grid = to_double_list(k, v); };
    t["gamma_grid"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.gamma_grid = to_double_list(k, v); };
    t["folds"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.folds = static_cast<int>(to_int(k, v)); };
    t["smo_tolerance"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.smo_tolerance = to_double(k, v); };
    t["max_passes"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.max_passes = static_cast<int>(to_int(k, v)); };
    t["seed"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.seed = static_cast<std::uint64_t>(to_int(k, v)); };
    t["positive_weight"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.positive_weight = to_double(k, v); };
    t["negative_weight"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.negative_weight = to_double(k, v); };
    t["cache_mb"] = [](PipelineConfig& c, auto& k, auto& v) { c.train.cache_mb = static_cast<std::size_t>(to_int(k, v)); };

    t["traversable_classes"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.ground_truth.traversable_classes.clear();
      for (double d : to_double_list(k, v)) {
        if (d < 0 || d > 65535 || d != static_cast<double>(static_cast<long long>(d)))
          throw ConfigError(k + ": class ids must be integers in [0, 65535]");
        c.ground_truth.traversable_classes.push_back(static_cast<std::uint16_t>(d));
      }
    };
    t["gt_min_points"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.ground_truth.min_points = static_cast<int>(to_int(k, v));
    };
    t["nontrav_threshold"] = [](PipelineConfig& c, auto& k, auto& v) {
      c.ground_truth.nontrav_threshold = static_cast<int>(to_int(k, v));
    };
    return t;
  }();
  return table;
}

}  // namespace

FrameRange FrameRange::Parse(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  FrameRange r;
  if (dots == std::string::npos) {
    r.first = r.last = static_cast<int>(to_int("frame range", t));
  } else {
    r.first = static_cast<int>(to_int("frame range", trim(t.substr(0, dots))));
    r.last = static_cast<int>(to_int("frame range", trim(t.substr(dots + 2))));
  }
  if (r.first < 0) throw ConfigError("frame range \"" + t + "\" must start at >= 0");
  return r;
}

std::string FrameRange::str() const { return std::to_string(first) + ".." + std::to_string(last); }

void PipelineConfig::validate(bool require_paths) const {
  grid.validate();
  train.validate();
  ground_truth.validate();
  if (filter.w < 1) throw ConfigError("filter_weight must be >= 1");
  if (train_frames.overlaps(test_frames))
    throw ConfigError("train_frames " + train_frames.str() + " overlaps test_frames " + test_frames.str());
  if (color_warmup_frames < 0) throw ConfigError("color_warmup_frames must be >= 0");
  if (raster_format != "png" && raster_format != "ppm") throw ConfigError("raster_format must be png or ppm");
  if (require_paths) {
    if (dataset_root.empty()) throw ConfigError("dataset_root is not set");
    if (!std::filesystem::exists(dataset_root))
      throw ConfigError("dataset_root " + dataset_root.string() + " does not exist");
  }
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
    it->second(cfg, key, value);
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  PipelineConfig cfg = parse_config(ss.str());
  // Relative paths resolve against the config file's directory.
  const auto base = path.parent_path();
  if (!cfg.dataset_root.empty() && cfg.dataset_root.is_relative()) cfg.dataset_root = base / cfg.dataset_root;
  if (cfg.output_dir.is_relative()) cfg.output_dir = base / cfg.output_dir;
  if (cfg.label_map && cfg.label_map->is_relative()) cfg.label_map = base / *cfg.label_map;
  return cfg;
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream o;
  o << "dataset_root = " << c.dataset_root.string() << '\n'
    << "sequence = " << c.sequence << '\n'
    << "train_frames = " << c.train_frames.str() << '\n'
    << "test_frames = " << c.test_frames.str() << '\n'
    << "output_dir = " << c.output_dir.string() << '\n'
    << "label_map = " << (c.label_map ? c.label_map->string() : std::string()) << '\n'
    << "feature_mode = " << to_string(c.feature_mode) << '\n'
    << "parallel = " << (c.parallel ? "true" : "false") << '\n'
    << "compose_calib = " << (c.compose_calib ? "true" : "false") << '\n'
    << "fixed_origin = " << (c.fixed_origin ? "true" : "false") << '\n'
    << "color_warmup_frames = " << c.color_warmup_frames << '\n'
    << "max_train_samples = " << c.max_train_samples << '\n'
    << "raster_format = " << c.raster_format << '\n'
    << "latency_budget_ms = " << shortest(c.latency_budget_ms) << '\n'
    << "max_range = " << shortest(c.grid.max_range) << '\n'
    << "resolution = " << shortest(c.grid.resolution) << '\n'
    << "internal_resolution = " << shortest(c.grid.internal_resolution) << '\n'
    << "min_points = " << c.grid.min_points << '\n'
    << "integration_count = " << c.grid.integration_count << '\n'
    << "curvity_bins = " << c.grid.curvity_bins << '\n'
    << "h_buckets = " << c.grid.h_buckets << '\n'
    << "s_buckets = " << c.grid.s_buckets << '\n'
    << "v_buckets = " << c.grid.v_buckets << '\n'
    << "filter_weight = " << c.filter.w << '\n'
    << "c_grid = " << join(c.train.c_grid) << '\n'
    << "gamma_grid = " << join(c.train.gamma_grid) << '\n'
    << "folds = " << c.train.folds << '\n'
    << "smo_tolerance = " << shortest(c.train.smo_tolerance) << '\n'
    << "max_passes = " << c.train.max_passes << '\n'
    << "seed = " << c.train.seed << '\n'
    << "positive_weight = " << shortest(c.train.positive_weight) << '\n'
    << "negative_weight = " << shortest(c.train.negative_weight) << '\n'
    << "cache_mb = " << c.train.cache_mb << '\n'
    << "traversable_classes = " << join(c.ground_truth.traversable_classes) << '\n'
    << "gt_min_points = " << c.ground_truth.min_points << '\n'
    << "nontrav_threshold = " << c.ground_truth.nontrav_threshold << '\n';
  return o.str();
}

}  // namespace travgrid
