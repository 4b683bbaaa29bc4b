// Throughput of the per-frame hot paths and the graph metrics.

#include <benchmark/benchmark.h>

#include <random>

#include "oasis/eval.hpp"
#include "oasis/geo.hpp"
#include "oasis/pipeline.hpp"
#include "oasis/segment.hpp"
#include "oasis/sidewalk.hpp"
#include "oasis/synth.hpp"

using namespace oasis;

namespace {

SceneSpec straight_scene(double length) {
  SceneSpec s;
  s.name = "bench";
  s.paths.push_back({{{0, -10}, {0, length + 100}}, {1.8, 1.8}, EdgeKind::sidewalk});
  s.trajectory = {{0, 0}, {0, length}};
  return s;
}

void BM_Haversine(benchmark::State& state) {
  std::mt19937_64 rng{1};
  std::uniform_real_distribution<double> lat(-80.0, 80.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  std::vector<GeoPoint> pts(1024);
  for (auto& p : pts) p = {lat(rng), lon(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(haversine_distance(pts[i & 1023], pts[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Haversine);

void BM_Render(benchmark::State& state) {
  auto const scene = straight_scene(50.0);
  SceneRenderer const r{scene, CameraModel::survey_default()};
  for (auto _ : state) benchmark::DoNotOptimize(r.render({0, 10, 0}));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_TemporalFuse(benchmark::State& state) {
  auto const scene = straight_scene(50.0);
  SceneRenderer const r{scene, CameraModel::survey_default()};
  auto const mask = r.render({0, 10, 0}).mask;
  TemporalFuser fuser{3};
  for (auto _ : state) benchmark::DoNotOptimize(fuser.push(mask, std::nullopt));
}
BENCHMARK(BM_TemporalFuse)->Unit(benchmark::kMillisecond);

void BM_SampleRows(benchmark::State& state) {
  auto const cam = CameraModel::survey_default();
  auto const f = SceneRenderer{straight_scene(50.0), cam}.render({0, 10, 0});
  for (auto _ : state) benchmark::DoNotOptimize(sample_rows(f.mask, f.depth, cam));
}
BENCHMARK(BM_SampleRows);

void BM_GraphMetrics(benchmark::State& state) {
  auto const truth = ground_truth(corridor_scene()).graph;
  for (auto _ : state) benchmark::DoNotOptimize(graph_metrics(truth, truth));
}
BENCHMARK(BM_GraphMetrics)->Unit(benchmark::kMillisecond);

void BM_PipelineShortSurvey(benchmark::State& state) {
  auto const scene = straight_scene(10.0);
  for (auto _ : state) {
    SyntheticFrameSource src{scene, CameraModel::survey_default()};
    benchmark::DoNotOptimize(run_pipeline(src, PipelineConfig{}));
  }
}
BENCHMARK(BM_PipelineShortSurvey)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
