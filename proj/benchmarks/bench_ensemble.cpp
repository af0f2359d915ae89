#include <benchmark/benchmark.h>

#include <vector>

#include "rair/ensemble.hpp"

namespace {

void BM_MlpForward(benchmark::State& state) {
  rair::Mlp net({26, 32, 32, 16});
  rair::Rng rng(4);
  net.init_xavier(rng);
  std::vector<double> in(26, 0.3), out(16);
  for (auto _ : state) {
    net.forward(in, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_MlpForward);

void BM_EnsemblePredict(benchmark::State& state) {
  rair::GridConfig g;
  g.width = 15;
  g.height = 15;
  g.num_entities = 8;
  const rair::GridWorld world(g);
  rair::EnsembleConfig ec;
  const rair::Ensemble e(ec, 8, 15, 15, 10);
  const auto s = world.reset(1);
  for (auto _ : state) benchmark::DoNotOptimize(e.predict(s, {0.5, -0.5}));
}
BENCHMARK(BM_EnsemblePredict);

}  // namespace
