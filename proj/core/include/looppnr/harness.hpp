#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "looppnr/prior.hpp"
#include "looppnr/simulator.hpp"
#include "looppnr/statistics.hpp"
#include "looppnr/strategy.hpp"

namespace looppnr {

/// Declarative description of an outcoupling policy, buildable for any params.
struct PolicySpec {
  enum class Kind { passive, adaptive };

  Kind kind = Kind::adaptive;
  double epsilon = 0.02;  // passive only
  double grid_min = 0.001;
  double grid_max = 1.0;
  std::size_t grid_points = 50;

  static PolicySpec passive(double epsilon) { return {Kind::passive, epsilon}; }
  static PolicySpec adaptive(double lo = 0.001, double hi = 1.0, std::size_t points = 50) {
    return {Kind::adaptive, 0.0, lo, hi, points};
  }

  [[nodiscard]] std::string label() const;
  [[nodiscard]] std::unique_ptr<OutcouplingPolicy> build(KernelCache& cache) const;
  void validate() const;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct EnsembleConfig {
  SystemParams params;
  PriorKind prior = UniformPrior{};
  std::vector<PolicySpec> policies{PolicySpec::adaptive()};
  std::vector<std::size_t> n0_values{40};
  std::size_t n_trials = 1000;
  double n_threshold = 0.5;
  /// Unset means StopRule::default_max_rounds.
  std::optional<std::size_t> max_rounds;
  std::uint64_t master_seed = 42;
  bool record_info_trace = false;
  /// Keep full per-trial click and epsilon histories in the result.
  bool keep_histories = false;

  void validate() const;
  [[nodiscard]] StopRule stop_rule() const;

  friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Aggregate statistics of one (eta, policy, n0) cell.
struct EnsembleSummary {
  double eta = 0.0;
  PolicySpec policy;
  std::size_t n0 = 0;
  std::size_t n_trials = 0;

  Estimate mean_est;
  Estimate mean_var_est;
  Estimate var_of_est;  // over trials, divided by n_trials
  Estimate mse;
  Estimate bias;
  Estimate mean_rounds;
  Estimate mean_clicks;

  /// Shot-noise reference MSE = n0.
  double shot_noise_mse = 0.0;
  /// Idealized-detector estimator variance; zero for n0 = 0.
  double optimal_variance = 0.0;
};

struct EnsembleResult {
  std::vector<EnsembleSummary> cells;
  /// trials[c] holds the records of cell c in trial order.
  std::vector<std::vector<TrialRecord>> trials;
};

/// Aggregates finished trials of one cell.
[[nodiscard]] EnsembleSummary summarize(double eta, const PolicySpec& policy, std::size_t n0,
                                        const std::vector<TrialRecord>& records);

/// Runs n_trials per (policy, n0) cell, cells ordered policy-major.
///
/// Trial t of every cell uses derive_trial_seed(master_seed, t); results do
/// not depend on `threads` (0 = hardware concurrency).
[[nodiscard]] EnsembleResult run_ensemble(const EnsembleConfig& config, unsigned threads = 0);

/// Repeats run_ensemble for each loop efficiency, returning the cells only.
[[nodiscard]] std::vector<EnsembleSummary> sweep(const EnsembleConfig& base, const std::vector<double>& eta_values,
                                                 unsigned threads = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace looppnr
