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

#include "travgrid/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

Metric ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string csv_metric(const Metric& m) { return m ? shortest(*m) : std::string("undef"); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("report: bad count \"" + s + "\"");
  return v;
}

double parse_f64(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("report: bad number \"" + s + "\"");
  return v;
}

const std::map<std::uint16_t, std::string>& expected_class_names() {
  static const std::map<std::uint16_t, std::string> names{
      {40, "road"}, {44, "parking"}, {48, "sidewalk"}, {49, "other-ground"}, {60, "lane-marking"}};
  return names;
}

}  // namespace

bool GroundTruthConfig::is_traversable(std::uint16_t cls) const {
  return std::find(traversable_classes.begin(), traversable_classes.end(), cls) != traversable_classes.end();
}

void GroundTruthConfig::validate() const {
  if (traversable_classes.empty()) throw ConfigError("traversable class set must be non-empty");
  if (min_points < 1) throw ConfigError("ground-truth min_points must be >= 1");
  if (nontrav_threshold < 1) throw ConfigError("nontrav_threshold must be >= 1");
}

void check_label_map(const std::filesystem::path& yaml_path, const GroundTruthConfig& cfg) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(yaml_path.string());
  } catch (const YAML::Exception& e) {
    throw DataError("label map " + yaml_path.string() + ": " + e.what());
  }
  const YAML::Node labels = root["labels"];
  if (!labels || !labels.IsMap()) throw DataError("label map " + yaml_path.string() + " has no \"labels\" mapping");
  for (std::uint16_t id : cfg.traversable_classes) {
    const YAML::Node name = labels[static_cast<int>(id)];
    if (!name) throw DataError("label map has no class id " + std::to_string(id));
    const auto it = expected_class_names().find(id);
    if (it != expected_class_names().end() && name.as<std::string>() != it->second)
      throw DataError("label map class " + std::to_string(id) + " is \"" + name.as<std::string>() +
                      "\", expected \"" + it->second + "\"");
  }
}

Label cell_ground_truth(const TraversabilityGrid& grid, const Cell& cell, const PointCloud& cloud,
                        const GroundTruthConfig& cfg) {
  int labeled = 0, nontrav = 0;
  for (std::uint32_t idx : grid.points_of(cell)) {
    const std::uint16_t cls = cloud.points[idx].semantic_class;
    if (cls == 0) continue;
    ++labeled;
    nontrav += !cfg.is_traversable(cls);
  }
  if (labeled < cfg.min_points) return Label::kUnknown;
  return nontrav >= cfg.nontrav_threshold ? Label::kNonTraversable : Label::kTraversable;
}

void label_ground_truth(TraversabilityGrid& grid, const PointCloud& cloud, const GroundTruthConfig& cfg) {
  for (Cell& c : grid.cells) c.gt_label = cell_ground_truth(grid, c, cloud, cfg);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  unk += o.unk;
  return *this;
}

ConfusionCounts score(std::span<const Label> gt, std::span<const Label> pred) {
  if (gt.size() != pred.size())
    throw DataError("score: ground truth has " + std::to_string(gt.size()) + " cells, prediction " +
                    std::to_string(pred.size()));
  ConfusionCounts c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == Label::kUnknown) continue;
    if (pred[i] == Label::kUnknown) {
      ++c.unk;
      continue;
    }
    const bool g = gt[i] == Label::kTraversable;
    const bool p = pred[i] == Label::kTraversable;
    if (g && p)
      ++c.tp;
    else if (!g && !p)
      ++c.tn;
    else if (p)
      ++c.fp;
    else
      ++c.fn;
  }
  return c;
}

ConfusionCounts score(const TraversabilityGrid& grid) {
  std::vector<Label> gt, pred;
  gt.reserve(grid.cell_count());
  pred.reserve(grid.cell_count());
  for (const Cell& c : grid.cells) {
    gt.push_back(c.gt_label);
    pred.push_back(c.filtered_label);
  }
  return score(gt, pred);
}

Metrics metrics(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn), fp = static_cast<double>(c.fp),
               fn = static_cast<double>(c.fn), tot = static_cast<double>(c.total());
  Metrics m;
  m.accuracy = ratio(tp + tn, tot);
  m.iou = ratio(tp, tp + fp + fn);
  m.iou_negative = ratio(tn, tn + fp + fn);
  if (m.iou && m.iou_negative) m.miou = 0.5 * (*m.iou + *m.iou_negative);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  m.rates_over_total = {ratio(tp, tot), ratio(tn, tot), ratio(fp, tot), ratio(fn, tot)};
  m.rates_per_class = {ratio(tp, tp + fn), ratio(tn, tn + fp), ratio(fp, tn + fp), ratio(fn, tp + fn)};
  return m;
}

void LatencyRecorder::record(const std::string& stage, double ms) {
  auto [it, inserted] = samples_.try_emplace(stage);
  if (inserted) order_.push_back(stage);
  it->second.push_back(ms);
}

std::vector<LatencyStats> LatencyRecorder::summary() const {
  std::vector<LatencyStats> out;
  for (const std::string& name : order_) {
    const auto& v = samples_.at(name);
    LatencyStats s;
    s.stage = name;
    s.samples = v.size();
    for (double x : v) {
      s.total_ms += x;
      s.max_ms = std::max(s.max_ms, x);
    }
    s.mean_ms = v.empty() ? 0.0 : s.total_ms / static_cast<double>(v.size());
    out.push_back(s);
  }
  return out;
}

LatencyStats measure_latency(const std::string& name, const std::function<void(std::size_t)>& stage,
                             std::size_t frames) {
  if (frames == 0) throw PreconditionError("measure_latency: need at least one frame");
  LatencyRecorder rec;
  for (std::size_t f = 0; f < frames; ++f) rec.record(name, time_ms([&] { stage(f); }));
  return rec.summary().front();
}

EvalReport make_report(std::vector<FrameEval> frames, std::vector<LatencyStats> latency) {
  EvalReport r;
  for (const FrameEval& f : frames) r.counts += f.counts;
  r.metrics = metrics(r.counts);
  r.per_frame = std::move(frames);
  r.latency = std::move(latency);
  return r;
}

std::string format_metric(const Metric& m, int precision) {
  if (!m) return "undef";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, *m);
  return buf;
}

std::string format_report_table(const EvalReport& report) {
  auto pct = [](const Metric& m) { return m ? format_metric(Metric(*m * 100.0), 1) : std::string("undef"); };
  const Metrics& m = report.metrics;
  // A stage named "total" already holds the per-frame sum; otherwise add the stages up.
  double latency_total = 0.0;
  for (const auto& s : report.latency) latency_total += s.mean_ms;
  for (const auto& s : report.latency)
    if (s.stage == "total") latency_total = s.mean_ms;
  char latency[32] = "   n/a  ";
  if (!report.latency.empty()) std::snprintf(latency, sizeof(latency), "%5.1f ms", latency_total);
  char line[256];
  std::ostringstream out;
  out << "| Experiment    |  Acc  | mIoU  |  F1   |  FPR  |  TPR  |  FNR  |  TNR  | Latency  |\n";
  out << "|---------------|-------|-------|-------|-------|-------|-------|-------|----------|\n";
  std::snprintf(line, sizeof(line), "| %-13s | %5s | %5s | %5s | %5s | %5s | %5s | %5s | %8s |\n", "travgrid",
                pct(m.accuracy).c_str(), pct(m.miou).c_str(), pct(m.f1).c_str(), pct(m.rates_per_class.fpr).c_str(),
                pct(m.rates_per_class.tpr).c_str(), pct(m.rates_per_class.fnr).c_str(),
                pct(m.rates_per_class.tnr).c_str(), latency);
  out << line;
  out << "\nRates above are per class (TPR = TP/(TP+FN), TNR = TN/(TN+FP)).\n";
  out << "Rates over TOT: TPR " << pct(m.rates_over_total.tpr) << "  TNR " << pct(m.rates_over_total.tnr)
      << "  FPR " << pct(m.rates_over_total.fpr) << "  FNR " << pct(m.rates_over_total.fnr) << '\n';
  out << "Positive-class IoU " << pct(m.iou) << ", negative-class IoU " << pct(m.iou_negative) << '\n';
  const ConfusionCounts& c = report.counts;
  out << "Counts: TP " << c.tp << "  TN " << c.tn << "  FP " << c.fp << "  FN " << c.fn << "  UNK " << c.unk
      << "  TOT " << c.total() << "  (" << report.per_frame.size() << " frames)\n";
  if (!report.latency.empty()) {
    out << "\n| Stage                | mean ms | max ms  |\n|----------------------|---------|---------|\n";
    for (const auto& s : report.latency) {
      std::snprintf(line, sizeof(line), "| %-20s | %7.2f | %7.2f |\n", s.stage.c_str(), s.mean_ms, s.max_ms);
      out << line;
    }
  }
  return out.str();
}

std::string format_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "kind,frame,tp,tn,fp,fn,unk,acc,iou,miou,f1,tpr,fnr,tnr,fpr,tpr_tot,fnr_tot,tnr_tot,fpr_tot\n";
  auto row = [&](const std::string& kind, const std::string& frame, const ConfusionCounts& c) {
    const Metrics m = metrics(c);
    out << kind << ',' << frame << ',' << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ',' << c.unk << ','
        << csv_metric(m.accuracy) << ',' << csv_metric(m.iou) << ',' << csv_metric(m.miou) << ','
        << csv_metric(m.f1) << ',' << csv_metric(m.rates_per_class.tpr) << ',' << csv_metric(m.rates_per_class.fnr)
        << ',' << csv_metric(m.rates_per_class.tnr) << ',' << csv_metric(m.rates_per_class.fpr) << ','
        << csv_metric(m.rates_over_total.tpr) << ',' << csv_metric(m.rates_over_total.fnr) << ','
        << csv_metric(m.rates_over_total.tnr) << ',' << csv_metric(m.rates_over_total.fpr) << '\n';
  };
  for (const FrameEval& f : report.per_frame) row("frame", std::to_string(f.frame), f.counts);
  row("total", "", report.counts);
  for (const auto& s : report.latency)
    out << "latency," << s.stage << ',' << s.samples << ',' << shortest(s.mean_ms) << ',' << shortest(s.max_ms)
        << ',' << shortest(s.total_ms) << '\n';
  return out.str();
}

EvalReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("kind,", 0) != 0) throw FormatError("report: missing header");
  std::vector<FrameEval> frames;
  std::vector<LatencyStats> latency;
  bool saw_total = false;
  ConfusionCounts total;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f[0] == "latency") {
      if (f.size() != 6) throw FormatError("report: bad latency row");
      LatencyStats s;
      s.stage = f[1];
      s.samples = parse_u64(f[2]);
      s.mean_ms = parse_f64(f[3]);
      s.max_ms = parse_f64(f[4]);
      s.total_ms = parse_f64(f[5]);
      latency.push_back(s);
      continue;
    }
    if (f.size() != 19) throw FormatError("report: bad row \"" + line + "\"");
    ConfusionCounts c{parse_u64(f[2]), parse_u64(f[3]), parse_u64(f[4]), parse_u64(f[5]), parse_u64(f[6])};
    if (f[0] == "frame") {
      frames.push_back({static_cast<int>(parse_u64(f[1])), c});
    } else if (f[0] == "total") {
      saw_total = true;
      total = c;
    } else {
      throw FormatError("report: unknown row kind \"" + f[0] + "\"");
    }
  }
  if (!saw_total) throw FormatError("report: missing total row");
  EvalReport r = make_report(std::move(frames), std::move(latency));
  if (!(r.counts == total)) throw FormatError("report: total row disagrees with per-frame rows");
  return r;
}

}  // namespace travgrid
