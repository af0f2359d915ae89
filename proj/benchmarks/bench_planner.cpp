#include <benchmark/benchmark.h>

#include "rair/dynamics.hpp"
#include "rair/planner.hpp"

namespace {

void BM_IcemPlanStep(benchmark::State& state) {
  rair::GridConfig g;
  const rair::GridWorld world(g);
  const rair::GroundTruthModel model(world);
  const auto start = world.reset(2);
  rair::PlannerConfig pc;
  rair::Objective objective;
  objective.phi = rair::PhiSpec::relational(rair::PhiVariant::AbsRelativePosition, 1.0);
  const auto reward = rair::make_step_reward(objective, start);
  std::uint64_t step = 0;
  for (auto _ : state) {
    rair::PlannerCarry carry;
    benchmark::DoNotOptimize(rair::icem_plan(model, start, pc, reward, carry, step++));
  }
}
BENCHMARK(BM_IcemPlanStep)->Unit(benchmark::kMillisecond);

void BM_ColoredNoise(benchmark::State& state) {
  rair::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(rair::sample_colored_noise(3.5, 30, 2, 64, rng));
}
BENCHMARK(BM_ColoredNoise);

}  // namespace
