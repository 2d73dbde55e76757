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

// Serial vs OpenMP paths of the per-cell kernels on one synthetic frame.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "synthetic.hpp"
#include "travgrid/cell_features.hpp"
#include "travgrid/pipeline.hpp"
#include "travgrid/postfilter.hpp"

using namespace travgrid;

namespace {

struct State {
  fixture::Scene scene{fixture::SceneSpec{}};
  PipelineConfig cfg;
  CameraModel cam;
  RgbImage image;
  FrameResult frame;
  std::vector<std::optional<GeomFeatures>> geom;
  SvmModel model;

  State() {
    cam = scene.camera();
    Pipeline pipe(cfg, cam);
    std::optional<FrameResult> r;
    for (int f = 0; f < 3; ++f) {
      image = scene.image(f);
      r = pipe.push(f, FrameInput{scene.scan(f), scene.lidar_pose(f), &image});
    }
    frame = std::move(*r);
    cam.width = image.width;
    cam.height = image.height;
    geom = grid_geom_features(frame.grid, frame.cloud, frame.lidar_pose.translation, cfg.grid, false);

    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    Pipeline::labeled_rows(frame, rows, labels);
    TrainConfig tc;
    model = train_scaled(rows, labels, 10.0, Kernel::Rbf(0.1), tc).model;
    model.feature_mode = cfg.feature_mode;
    predict_grid(frame.grid, frame.features, model, false);
  }
};

State& state() {
  static State s;
  return s;
}

void BM_GeomFeatures(benchmark::State& st) {
  State& s = state();
  for (auto _ : st)
    benchmark::DoNotOptimize(
        grid_geom_features(s.frame.grid, s.frame.cloud, s.frame.lidar_pose.translation, s.cfg.grid, st.range(0) != 0));
}

void BM_HsvCounts(benchmark::State& st) {
  State& s = state();
  for (auto _ : st)
    benchmark::DoNotOptimize(grid_hsv_counts(s.frame.grid, s.frame.cloud, s.geom, s.cam, s.frame.lidar_pose, s.image,
                                             s.cfg.grid, st.range(0) != 0));
}

void BM_PredictGrid(benchmark::State& st) {
  State& s = state();
  TraversabilityGrid g = s.frame.grid;
  for (auto _ : st) {
    predict_grid(g, s.frame.features, s.model, st.range(0) != 0);
    benchmark::ClobberMemory();
  }
  st.counters["support_vectors"] = static_cast<double>(s.model.support_vectors.size());
}

void BM_Filter(benchmark::State& st) {
  State& s = state();
  for (auto _ : st) benchmark::DoNotOptimize(filter_grid(s.frame.grid, s.cfg.filter.w, st.range(0) != 0));
}

}  // namespace

BENCHMARK(BM_GeomFeatures)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HsvCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Filter)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
