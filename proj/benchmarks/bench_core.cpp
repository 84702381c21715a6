#include <benchmark/benchmark.h>

#include <memory>

#include "looppnr/belief.hpp"
#include "looppnr/kernel.hpp"
#include "looppnr/simulator.hpp"
#include "looppnr/strategy.hpp"

using namespace looppnr;

namespace {

SystemParams params_for(benchmark::State& state) {
  return SystemParams{0.99, 0.9, 1e-6, static_cast<std::size_t>(state.range(0))};
}

// A belief a few dozen rounds into a passive trial, so the matrix is no longer diagonal.
BeliefMatrix warmed_belief(const SystemParams& params) {
  auto belief = init_belief(PriorDistribution::uniform(params.n_max));
  const auto kernel = transition_kernel(params, 0.02);
  for (int r = 0; r < 30; ++r) belief.apply(kernel, r % 3 == 0 ? 1 : 0);
  return belief;
}

}  // namespace

static void BM_TransitionKernel(benchmark::State& state) {
  const auto params = params_for(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transition_kernel(params, 0.02));
  }
}

static void BM_BeliefUpdate(benchmark::State& state) {
  const auto params = params_for(state);
  const auto kernel = transition_kernel(params, 0.02);
  const auto start = warmed_belief(params);
  for (auto _ : state) {
    auto belief = start;
    belief.apply(kernel, 0);
    benchmark::DoNotOptimize(belief.joint().data());
  }
}

static void BM_PropagateBoth(benchmark::State& state) {
  const auto params = params_for(state);
  const auto kernel = transition_kernel(params, 0.02);
  const auto belief = warmed_belief(params);
  Matrix out0, out1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_both(kernel, belief.joint(), out0, out1, AdaptivePolicy::kDefaultNegligible));
  }
}

static void BM_AdaptiveChoose(benchmark::State& state) {
  const auto params = params_for(state);
  KernelCache cache(params);
  AdaptivePolicy policy(cache, EpsilonGrid::standard());
  const auto belief = warmed_belief(params);
  (void)policy.choose(belief);
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy.choose(belief));
  }
}

static void BM_PassiveTrial(benchmark::State& state) {
  const auto params = params_for(state);
  KernelCache cache(params);
  PassivePolicy policy(cache, 0.02);
  const auto prior = PriorDistribution::uniform(params.n_max);
  const auto stop = StopRule::for_params(params);
  std::uint64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(params.n_max / 2, policy, params, prior, stop, derive_trial_seed(1, t++)));
  }
}

BENCHMARK(BM_TransitionKernel)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BeliefUpdate)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PropagateBoth)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdaptiveChoose)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PassiveTrial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
