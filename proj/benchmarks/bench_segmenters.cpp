#include <benchmark/benchmark.h>

#include "segbench/algorithms.hpp"
#include "segbench/forest.hpp"
#include "segbench/grabcut.hpp"
#include "segbench/harness.hpp"
#include "segbench/naive.hpp"

using namespace segbench;

namespace {

bench::DatasetItem disk(int size, bool color = false) {
  bench::SyntheticSpec spec;
  spec.size = size;
  spec.shapes = {bench::ShapeKind::Disk};
  spec.color = color;
  spec.noise_sigma = 10;
  return bench::make_synthetic_item(spec, 0);
}

void BM_Otsu(benchmark::State& state) {
  const auto item = disk(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(naive::otsu_segment(item.image));
}
BENCHMARK(BM_Otsu)->Arg(64)->Arg(256);

void BM_Canny(benchmark::State& state) {
  const auto item = disk(static_cast<int>(state.range(0)));
  const AlgorithmParams params;
  for (auto _ : state) benchmark::DoNotOptimize(canny_segment(item.image, params));
}
BENCHMARK(BM_Canny)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RegionGrow(benchmark::State& state) {
  const auto item = disk(static_cast<int>(state.range(0)));
  LabelRaster seeds(item.image.width(), item.image.height());
  seeds.set(static_cast<int>(item.shape->cx), static_cast<int>(item.shape->cy), SeedLabel::Foreground);
  for (auto _ : state) benchmark::DoNotOptimize(naive::region_grow(item.image, seeds, 25.0));
}
BENCHMARK(BM_RegionGrow)->Arg(64)->Arg(256);

void BM_ForestTrain(benchmark::State& state) {
  const auto item = disk(64);
  const auto stack = ml::extract_features(item.image);
  ml::TrainingSet set;
  set.feature_count = stack.feature_count();
  ml::append_mask_samples(set, stack, item.gt, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ml::train_forest(set, stack.names, {}));
}
BENCHMARK(BM_ForestTrain)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  const auto item = disk(static_cast<int>(state.range(0)));
  const auto stack = ml::extract_features(item.image);
  ml::TrainingSet set;
  set.feature_count = stack.feature_count();
  ml::append_mask_samples(set, stack, item.gt, 1000, 1);
  const auto forest = ml::train_forest(set, stack.names, {});
  for (auto _ : state) benchmark::DoNotOptimize(ml::predict_forest(forest, stack));
}
BENCHMARK(BM_ForestPredict)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GrabCut(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto item = disk(size, true);
  const auto& s = *item.shape;
  const opt::Rect rect{static_cast<int>(s.cx - s.radius) - 2, static_cast<int>(s.cy - s.radius) - 2,
                       static_cast<int>(2 * s.radius) + 5, static_cast<int>(2 * s.radius) + 5};
  for (auto _ : state) benchmark::DoNotOptimize(opt::grabcut(item.image, rect));
}
BENCHMARK(BM_GrabCut)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
