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

#include <filesystem>
#include <string>
#include <vector>

#include "travgrid/grid.hpp"
#include "travgrid/image.hpp"
#include "travgrid/svm.hpp"

namespace travgrid {

enum class LabelLayer { kGroundTruth, kPredicted, kFiltered };

/// Per-frame label grid as stored on disk:
///   TRAVGRID v1
///   frame <f>
///   side <l>
///   resolution <r>
///   origin <x> <y>
///   <l rows of l characters, row 0 (minimum y) first: T, N or '.'>
struct LabelGridFile {
  int frame = 0;
  int side = 0;
  double resolution = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<Label> labels;  // row-major
};

LabelGridFile label_grid_from(const TraversabilityGrid& grid, LabelLayer layer);
std::string format_label_grid(const LabelGridFile& g);
LabelGridFile parse_label_grid(const std::string& text);
void write_label_grid(const std::filesystem::path& path, const LabelGridFile& g);
LabelGridFile read_label_grid(const std::filesystem::path& path);

/// Top-down raster, +y up: white traversable, red non-traversable, gray unknown.
RgbImage render_label_raster(const LabelGridFile& g, int pixels_per_cell = 8);

inline constexpr Rgb kTraversableColor{255, 255, 255};
inline constexpr Rgb kNonTraversableColor{220, 0, 0};
inline constexpr Rgb kUnknownColor{128, 128, 128};

/// Training table: comment header "# travgrid features v1 mode=<m> dim=<d>",
/// then one comma-separated row per cell: label (+1 / -1) then the features.
struct FeatureTable {
  FeatureMode mode = FeatureMode::kHybrid;
  std::size_t dim = 0;
  std::vector<int> labels;
  std::vector<FeatureVector> rows;
};

std::string format_feature_table(const FeatureTable& t);
FeatureTable parse_feature_table(const std::string& text);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& t);
FeatureTable read_feature_table(const std::filesystem::path& path);

std::string format_cv_report(const GridSearchResult& r);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace travgrid
