#include "looppnr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "looppnr/information.hpp"

namespace looppnr {

namespace {

std::size_t draw_binomial(std::size_t n, double p, Rng& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long long> dist(static_cast<long long>(n), p);
  return static_cast<std::size_t>(dist(rng));
}

}  // namespace

std::size_t StopRule::default_max_rounds(const SystemParams& params, double n_threshold) {
  if (params.eta >= 1.0) return kRoundHardCap;
  const double estimate =
      2.0 * std::log(static_cast<double>(params.n_max) / n_threshold) / (1.0 - params.eta);
  if (!(estimate >= 1.0)) return 1;
  if (estimate >= static_cast<double>(kRoundHardCap)) return kRoundHardCap;
  return static_cast<std::size_t>(std::ceil(estimate));
}

StopRule StopRule::for_params(const SystemParams& params, double n_threshold) {
  StopRule rule{n_threshold, default_max_rounds(params, n_threshold)};
  rule.validate();
  return rule;
}

void StopRule::validate() const {
  if (!(n_threshold > 0.0) || !std::isfinite(n_threshold)) {
    throw InvalidArgument("stop rule: n_threshold must be positive");
  }
  if (max_rounds < 1) {
    throw InvalidArgument("stop rule: max_rounds must be >= 1");
  }
}

RoundOutcome sample_round(std::size_t n_true, const SystemParams& params, double epsilon, Rng& rng) {
  if (n_true > params.n_max) {
    throw InvalidArgument("sample_round: photon count exceeds n_max");
  }
  const double detect = params.eta * epsilon * params.gamma;
  const std::size_t detected = draw_binomial(n_true, detect, rng);

  const double not_detected = 1.0 - detect;
  std::size_t left = 0;
  if (not_detected >= kSingularTolerance) {
    const double stay = std::clamp(params.eta * (1.0 - epsilon) / not_detected, 0.0, 1.0);
    left = draw_binomial(n_true - detected, stay, rng);
  }

  std::bernoulli_distribution dark(params.nu);
  const bool dark_click = dark(rng);
  return {left, (detected > 0 || dark_click) ? 1 : 0};
}

std::size_t TrialRecord::click_count() const noexcept {
  return static_cast<std::size_t>(std::count(clicks.begin(), clicks.end(), std::uint8_t{1}));
}

TrialRecord run_trial(std::size_t n0, const OutcouplingPolicy& policy, const SystemParams& params,
                      const PriorDistribution& prior, const StopRule& stop, std::uint64_t seed,
                      const TrialOptions& options) {
  params.validate();
  stop.validate();
  if (n0 > params.n_max) {
    throw InvalidArgument("run_trial: n0 = " + std::to_string(n0) + " exceeds n_max = " + std::to_string(params.n_max));
  }
  if (prior.n_max() != params.n_max) {
    throw InvalidArgument("run_trial: prior support does not match n_max");
  }

  Rng rng(seed);
  BeliefMatrix belief(std::make_shared<const PriorDistribution>(prior));
  if (options.observer) options.observer(belief);

  TrialRecord record;
  record.n0_true = n0;
  record.seed = seed;

  std::size_t photons = n0;
  while (record.rounds < stop.max_rounds && expected_loop_photons(belief) >= stop.n_threshold) {
    const PolicyDecision decision = policy.choose(belief);
    const RoundOutcome outcome = sample_round(photons, params, decision.epsilon, rng);
    photons = outcome.photons_left;
    belief.apply(policy.kernel(decision), outcome.click);

    record.clicks.push_back(static_cast<std::uint8_t>(outcome.click));
    record.epsilons.push_back(decision.epsilon);
    ++record.rounds;
    if (options.record_info_trace) {
      record.info_trace.push_back(
          {outcome.click, decision.epsilon, info_gained(belief), info_available(belief), expected_loop_photons(belief)});
    }
    if (options.observer) options.observer(belief);
  }

  record.n_est = mean_estimate(belief);
  record.var_est = variance_estimate(belief);
  record.n_mle = mle_estimate(belief);
  return record;
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master_seed) ^ trial_index);
}

}  // namespace looppnr
