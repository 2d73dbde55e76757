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

#include "travgrid/tables.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

double parse_f64(std::string_view s, const char* what) {
  if (s.size() > 1 && s.front() == '+') s.remove_prefix(1);  // from_chars rejects a leading '+'
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError(std::string(what) + ": bad number \"" + std::string(s) + "\"");
  return v;
}

char label_char(Label l) {
  switch (l) {
    case Label::kTraversable:
      return 'T';
    case Label::kNonTraversable:
      return 'N';
    default:
      return '.';
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

LabelGridFile label_grid_from(const TraversabilityGrid& grid, LabelLayer layer) {
  LabelGridFile g;
  g.frame = grid.frame_index;
  g.side = grid.side;
  g.resolution = grid.resolution;
  g.origin_x = grid.origin_x;
  g.origin_y = grid.origin_y;
  g.labels.reserve(grid.cell_count());
  for (const Cell& c : grid.cells) {
    g.labels.push_back(layer == LabelLayer::kGroundTruth ? c.gt_label
                       : layer == LabelLayer::kPredicted ? c.predicted_label
                                                         : c.filtered_label);
  }
  return g;
}

std::string format_label_grid(const LabelGridFile& g) {
  std::ostringstream out;
  out << "TRAVGRID v1\nframe " << g.frame << "\nside " << g.side << "\nresolution " << shortest(g.resolution)
      << "\norigin " << shortest(g.origin_x) << ' ' << shortest(g.origin_y) << '\n';
  for (int row = 0; row < g.side; ++row) {
    for (int col = 0; col < g.side; ++col) out << label_char(g.labels[static_cast<std::size_t>(row * g.side + col)]);
    out << '\n';
  }
  return out.str();
}

LabelGridFile parse_label_grid(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version, key;
  LabelGridFile g;
  if (!(in >> magic >> version) || magic != "TRAVGRID") throw FormatError("label grid: missing TRAVGRID header");
  if (version != "v1") throw FormatError("label grid: unsupported version " + version);
  std::string sres, sx, sy;
  if (!(in >> key >> g.frame) || key != "frame") throw FormatError("label grid: expected frame");
  if (!(in >> key >> g.side) || key != "side" || g.side <= 0) throw FormatError("label grid: expected side");
  if (!(in >> key >> sres) || key != "resolution") throw FormatError("label grid: expected resolution");
  if (!(in >> key >> sx >> sy) || key != "origin") throw FormatError("label grid: expected origin");
  g.resolution = parse_f64(sres, "label grid");
  g.origin_x = parse_f64(sx, "label grid");
  g.origin_y = parse_f64(sy, "label grid");
  g.labels.reserve(static_cast<std::size_t>(g.side * g.side));
  for (int row = 0; row < g.side; ++row) {
    std::string line;
    if (!(in >> line) || static_cast<int>(line.size()) != g.side)
      throw FormatError("label grid: row " + std::to_string(row) + " truncated");
    for (char ch : line) {
      if (ch == 'T')
        g.labels.push_back(Label::kTraversable);
      else if (ch == 'N')
        g.labels.push_back(Label::kNonTraversable);
      else if (ch == '.')
        g.labels.push_back(Label::kUnknown);
      else
        throw FormatError(std::string("label grid: bad cell character '") + ch + "'");
    }
  }
  return g;
}

void write_label_grid(const std::filesystem::path& path, const LabelGridFile& g) {
  write_file(path, format_label_grid(g));
}

LabelGridFile read_label_grid(const std::filesystem::path& path) {
  try {
    return parse_label_grid(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

RgbImage render_label_raster(const LabelGridFile& g, int ppc) {
  RgbImage img(g.side * ppc, g.side * ppc, kUnknownColor);
  for (int row = 0; row < g.side; ++row) {
    for (int col = 0; col < g.side; ++col) {
      const Label l = g.labels[static_cast<std::size_t>(row * g.side + col)];
      const Rgb c = l == Label::kTraversable ? kTraversableColor
                    : l == Label::kNonTraversable ? kNonTraversableColor
                                                  : kUnknownColor;
      const int y0 = (g.side - 1 - row) * ppc;
      for (int y = y0; y < y0 + ppc; ++y)
        for (int x = col * ppc; x < (col + 1) * ppc; ++x) img.set(x, y, c);
    }
  }
  return img;
}

std::string format_feature_table(const FeatureTable& t) {
  std::string out = "# travgrid features v1 mode=" + std::string(to_string(t.mode)) + " dim=" + std::to_string(t.dim) + "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out += t.labels[i] > 0 ? "+1" : "-1";
    for (double v : t.rows[i]) {
      out += ',';
      out += shortest(v);
    }
    out += '\n';
  }
  return out;
}

FeatureTable parse_feature_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# travgrid features v1 ", 0) != 0)
    throw FormatError("feature table: missing header");
  FeatureTable t;
  {
    std::istringstream hs(line.substr(23));
    std::string tok;
    bool have_mode = false, have_dim = false;
    while (hs >> tok) {
      if (tok.rfind("mode=", 0) == 0) {
        try {
          t.mode = feature_mode_from_string(tok.substr(5));
        } catch (const ConfigError& e) {
          throw FormatError(std::string("feature table: ") + e.what());
        }
        have_mode = true;
      } else if (tok.rfind("dim=", 0) == 0) {
        t.dim = static_cast<std::size_t>(parse_f64(tok.substr(4), "feature table"));
        have_dim = true;
      }
    }
    if (!have_mode || !have_dim) throw FormatError("feature table: header needs mode= and dim=");
  }
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::string_view rest = line;
    std::vector<double> vals;
    while (true) {
      const auto comma = rest.find(',');
      vals.push_back(parse_f64(rest.substr(0, comma), "feature table"));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (vals.size() != t.dim + 1)
      throw FormatError("feature table line " + std::to_string(line_no) + ": expected " + std::to_string(t.dim + 1) +
                        " columns, got " + std::to_string(vals.size()));
    if (vals[0] != 1.0 && vals[0] != -1.0)
      throw FormatError("feature table line " + std::to_string(line_no) + ": label must be +1 or -1");
    t.labels.push_back(static_cast<int>(vals[0]));
    t.rows.emplace_back(vals.begin() + 1, vals.end());
  }
  return t;
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& t) {
  write_file(path, format_feature_table(t));
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  try {
    return parse_feature_table(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_cv_report(const GridSearchResult& r) {
  std::ostringstream out;
  out << "c,gamma,mean_accuracy";
  const std::size_t folds = r.report.empty() ? 0 : r.report.front().fold_accuracy.size();
  for (std::size_t f = 0; f < folds; ++f) out << ",fold" << f;
  out << ",selected\n";
  for (const CvEntry& e : r.report) {
    out << shortest(e.c) << ',' << shortest(e.gamma) << ',' << shortest(e.mean_accuracy);
    for (double a : e.fold_accuracy) out << ',' << shortest(a);
    out << ',' << (e.c == r.best_c && e.gamma == r.best_gamma ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace travgrid
