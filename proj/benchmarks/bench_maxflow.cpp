#include <benchmark/benchmark.h>

#include <random>

#include "segbench/graphcut.hpp"
#include "segbench/harness.hpp"
#include "segbench/maxflow.hpp"

using namespace segbench;

namespace {

/// 4-connected grid with random terminal and neighbor capacities.
opt::FlowNetwork random_grid(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cap(0.0, 10.0);
  opt::FlowNetwork net(side * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int p = y * side + x;
      net.add_terminal(p, cap(rng), cap(rng));
      if (x + 1 < side) net.add_edge(p, p + 1, cap(rng), cap(rng));
      if (y + 1 < side) net.add_edge(p, p + side, cap(rng), cap(rng));
    }
  }
  return net;
}

void BM_MaxFlowGrid(benchmark::State& state) {
  const auto net = random_grid(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(opt::max_flow(net));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_MaxFlowGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GraphCutDisk(benchmark::State& state) {
  bench::SyntheticSpec spec;
  spec.size = static_cast<int>(state.range(0));
  spec.shapes = {bench::ShapeKind::Disk};
  spec.noise_sigma = 15;
  const auto item = bench::make_synthetic_item(spec, 0);
  LabelRaster seeds(spec.size, spec.size);
  seeds.set(static_cast<int>(item.shape->cx), static_cast<int>(item.shape->cy), SeedLabel::Foreground);
  seeds.set(1, 1, SeedLabel::Background);
  for (auto _ : state) benchmark::DoNotOptimize(opt::graph_cut_segment(item.image, seeds));
}
BENCHMARK(BM_GraphCutDisk)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
