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

#include "travgrid/postfilter.hpp"

#include <vector>

#include "travgrid/error.hpp"

namespace travgrid {

namespace {

Label vote(const TraversabilityGrid& grid, int row, int col, int w) {
  const Cell& c = grid.at(row, col);
  const Label own = c.predicted_label;
  int trav = own == Label::kTraversable ? w : 0;
  int nontrav = own == Label::kNonTraversable ? w : 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const int r = row + dr, cc = col + dc;
      if (r < 0 || cc < 0 || r >= grid.side || cc >= grid.side) continue;
      const Cell& n = grid.at(r, cc);
      if (!n.predictable()) continue;
      trav += n.predicted_label == Label::kTraversable;
      nontrav += n.predicted_label == Label::kNonTraversable;
    }
  }
  if (trav > nontrav) return Label::kTraversable;
  if (nontrav > trav) return Label::kNonTraversable;
  return own;
}

}  // namespace

TraversabilityGrid filter_grid(TraversabilityGrid grid, int w, bool parallel) {
  if (w < 1) throw PreconditionError("filter_grid: w must be >= 1");
  std::vector<Label> out(grid.cell_count(), Label::kUnknown);
  const int side = grid.side;
#pragma omp parallel for schedule(static) if (parallel)
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const Cell& c = grid.at(row, col);
      if (c.predictable() && c.predicted_label != Label::kUnknown) out[grid.index(row, col)] = vote(grid, row, col, w);
    }
  }
  for (std::size_t i = 0; i < grid.cell_count(); ++i) grid.cells[i].filtered_label = out[i];
  return grid;
}

}  // namespace travgrid
