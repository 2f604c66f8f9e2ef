#include <benchmark/benchmark.h>

#include <string>

#include "cpg/estimators.hpp"
#include "cpg/mdp_io.hpp"
#include "cpg/oracle.hpp"
#include "cpg/policy.hpp"

namespace {

const cpg::TabularMdp& split2() {
  static const cpg::TabularMdp mdp = cpg::load_mdp(std::string(CPG_FIXTURE_DIR) + "/split2.mdp");
  return mdp;
}

void BM_StateActionValues(benchmark::State& state) {
  const auto& mdp = split2();
  const auto theta = cpg::PolicyParams::zeros_for(mdp);
  for (auto _ : state) benchmark::DoNotOptimize(cpg::state_action_values(mdp, theta));
}
BENCHMARK(BM_StateActionValues);

void BM_ExactGradient(benchmark::State& state) {
  const auto& mdp = split2();
  const auto theta = cpg::PolicyParams::zeros_for(mdp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpg::exact_gradient(mdp, theta, cpg::GradientKind::classical));
  }
}
BENCHMARK(BM_ExactGradient);

void BM_EstimateGradient(benchmark::State& state) {
  const auto& mdp = split2();
  const auto theta = cpg::PolicyParams::zeros_for(mdp);
  const auto kind = static_cast<cpg::GradientKind>(state.range(0));
  const auto episodes = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpg::estimate_gradient(mdp, theta, kind, episodes, 7, {.workers = 1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_EstimateGradient)
    ->ArgsProduct({{static_cast<long>(cpg::GradientKind::start),
                    static_cast<long>(cpg::GradientKind::classical),
                    static_cast<long>(cpg::GradientKind::classical_oracle_q)},
                   {10'000}})
    ->Unit(benchmark::kMillisecond);

void BM_EstimateGradientParallel(benchmark::State& state) {
  const auto& mdp = split2();
  const auto theta = cpg::PolicyParams::zeros_for(mdp);
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpg::estimate_gradient(mdp, theta, cpg::GradientKind::classical, 100'000, 7,
                                                    {.workers = workers}));
  }
}
BENCHMARK(BM_EstimateGradientParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CountTrajectories(benchmark::State& state) {
  const auto& mdp = split2();
  for (auto _ : state) benchmark::DoNotOptimize(cpg::count_trajectories(mdp));
}
BENCHMARK(BM_CountTrajectories);

}  // namespace

BENCHMARK_MAIN();
