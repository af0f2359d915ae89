#include <benchmark/benchmark.h>

#include "rair/gridworld.hpp"
#include "rair/reward.hpp"

namespace {

void BM_RairReward(benchmark::State& state) {
  rair::GridConfig g;
  g.num_entities = static_cast<int>(state.range(0));
  const auto views = rair::entity_views(rair::GridWorld(g).reset(1));
  const auto phi = rair::PhiSpec::relational(rair::PhiVariant::AbsRelativePosition, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rair::rair_reward(views, phi));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RairReward)->Arg(8)->Arg(16)->Arg(64);

void BM_DirectReward(benchmark::State& state) {
  rair::GridConfig g;
  const auto views = rair::entity_views(rair::GridWorld(g).reset(1));
  const auto phi = rair::PhiSpec::direct(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rair::rair_reward(views, phi));
}
BENCHMARK(BM_DirectReward);

}  // namespace
