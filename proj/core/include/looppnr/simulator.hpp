#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "looppnr/belief.hpp"
#include "looppnr/prior.hpp"
#include "looppnr/strategy.hpp"

namespace looppnr {

using Rng = std::mt19937_64;

inline constexpr std::size_t kRoundHardCap = 10000;

/// When to end a trial: once the expected number of photons still in the loop
/// drops below `n_threshold`, or after `max_rounds` rounds.
struct StopRule {
  double n_threshold = 0.5;
  std::size_t max_rounds = 1;

  /// Twice the loss-dominated round estimate ln(n_max / n_threshold) / (1 - eta),
  /// rounded up and clamped to [1, kRoundHardCap].
  static std::size_t default_max_rounds(const SystemParams& params, double n_threshold);
  static StopRule for_params(const SystemParams& params, double n_threshold = 0.5);

  void validate() const;

  friend bool operator==(const StopRule&, const StopRule&) = default;
};

struct RoundOutcome {
  std::size_t photons_left = 0;
  int click = 0;
};

/// Samples one physical round from the true photon count: detections, then
/// survivors among the undetected, then an independent dark count.
[[nodiscard]] RoundOutcome sample_round(std::size_t n_true, const SystemParams& params, double epsilon, Rng& rng);

/// Per-round diagnostics, recorded after the round's Bayes update.
struct RoundTrace {
  int click = 0;
  double epsilon = 0.0;
  double info_gained = 0.0;
  double info_available = 0.0;
  double expected_loop_photons = 0.0;
};

struct TrialRecord {
  std::size_t n0_true = 0;
  std::vector<std::uint8_t> clicks;
  std::vector<double> epsilons;
  std::size_t rounds = 0;
  double n_est = 0.0;
  double var_est = 0.0;
  std::size_t n_mle = 0;
  std::vector<RoundTrace> info_trace;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t click_count() const noexcept;
};

struct TrialOptions {
  bool record_info_trace = false;
  /// Called with the belief at round 0 and after every update.
  std::function<void(const BeliefMatrix&)> observer;
};

/// Runs one detection from n0 photons until the stop rule fires.
///
/// The policy sees only the belief; photon fates are drawn from the hidden
/// true count. Deterministic in (seed, arguments).
[[nodiscard]] TrialRecord run_trial(std::size_t n0, const OutcouplingPolicy& policy, const SystemParams& params,
                                    const PriorDistribution& prior, const StopRule& stop, std::uint64_t seed,
                                    const TrialOptions& options = {});

/// Seed of trial `trial_index` under `master_seed` (splitmix64 mixing).
[[nodiscard]] std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

}  // namespace looppnr
