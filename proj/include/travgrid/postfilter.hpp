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

#include "travgrid/grid.hpp"

namespace travgrid {

struct FilterConfig {
  int w = 3;  // weight of the centre cell's own vote
};

/// One pass of the weighted 8-neighbour majority vote over predicted labels.
/// Each predictable cell gets `w` votes for its own predicted label and one
/// vote per predictable neighbour; ties keep the cell's label. All votes read
/// the unfiltered labels. Writes filtered_label; unpredictable cells stay unknown.
TraversabilityGrid filter_grid(TraversabilityGrid grid, int w, bool parallel = false);

}  // namespace travgrid
