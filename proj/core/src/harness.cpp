#include "looppnr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "looppnr/optimal.hpp"

namespace looppnr {

std::string PolicySpec::label() const {
  std::ostringstream out;
  if (kind == Kind::passive) {
    out << "passive(" << epsilon << ")";
  } else {
    out << "adaptive";
  }
  return out.str();
}

void PolicySpec::validate() const {
  if (kind == Kind::passive) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
      throw InvalidArgument("passive policy: epsilon must lie in (0, 1]");
    }
    return;
  }
  if (grid_points == 1) {
    if (!(grid_min > 0.0 && grid_min <= 1.0)) throw InvalidArgument("adaptive grid: value must lie in (0, 1]");
    return;
  }
  if (!(grid_min > 0.0 && grid_min < grid_max && grid_max <= 1.0) || grid_points < 1) {
    throw InvalidArgument("adaptive grid: require 0 < grid_min < grid_max <= 1 and grid_points >= 1");
  }
}

std::unique_ptr<OutcouplingPolicy> PolicySpec::build(KernelCache& cache) const {
  validate();
  if (kind == Kind::passive) {
    return std::make_unique<PassivePolicy>(cache, epsilon);
  }
  EpsilonGrid grid = grid_points == 1 ? EpsilonGrid({grid_min}) : EpsilonGrid::log_spaced(grid_min, grid_max, grid_points);
  return std::make_unique<AdaptivePolicy>(cache, std::move(grid));
}

void EnsembleConfig::validate() const {
  params.validate();
  if (policies.empty()) throw InvalidArgument("ensemble: at least one policy is required");
  for (const auto& p : policies) p.validate();
  if (n0_values.empty()) throw InvalidArgument("ensemble: n0_values must not be empty");
  for (auto n0 : n0_values) {
    if (n0 > params.n_max) {
      throw InvalidArgument("ensemble: n0 = " + std::to_string(n0) + " exceeds n_max = " + std::to_string(params.n_max));
    }
  }
  if (n_trials < 1) throw InvalidArgument("ensemble: n_trials must be >= 1");
  stop_rule().validate();
  (void)PriorDistribution(prior, params.n_max);
}

StopRule EnsembleConfig::stop_rule() const {
  StopRule rule = StopRule::for_params(params, n_threshold);
  if (max_rounds) rule.max_rounds = *max_rounds;
  return rule;
}

EnsembleSummary summarize(double eta, const PolicySpec& policy, std::size_t n0,
                          const std::vector<TrialRecord>& records) {
  RunningMoments est, var_est, sq_err, rounds, clicks;
  const auto truth = static_cast<double>(n0);
  for (const auto& r : records) {
    est.push(r.n_est);
    var_est.push(r.var_est);
    sq_err.push((r.n_est - truth) * (r.n_est - truth));
    rounds.push(static_cast<double>(r.rounds));
    clicks.push(static_cast<double>(r.click_count()));
  }

  EnsembleSummary s;
  s.eta = eta;
  s.policy = policy;
  s.n0 = n0;
  s.n_trials = records.size();
  s.mean_est = {est.mean(), est.standard_error()};
  s.mean_var_est = {var_est.mean(), var_est.standard_error()};
  s.var_of_est = {est.population_variance(), est.variance_standard_error()};
  s.mse = {sq_err.mean(), sq_err.standard_error()};
  s.bias = {est.mean() - truth, est.standard_error()};
  s.mean_rounds = {rounds.mean(), rounds.standard_error()};
  s.mean_clicks = {clicks.mean(), clicks.standard_error()};
  s.shot_noise_mse = truth;
  return s;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

EnsembleResult run_ensemble(const EnsembleConfig& config, unsigned threads) {
  config.validate();
  const StopRule stop = config.stop_rule();
  const PriorDistribution prior(config.prior, config.params.n_max);

  KernelCache cache(config.params);
  std::vector<std::unique_ptr<OutcouplingPolicy>> policies;
  for (const auto& spec : config.policies) policies.push_back(spec.build(cache));

  const std::size_t n_cells = config.policies.size() * config.n0_values.size();
  EnsembleResult result;
  result.trials.assign(n_cells, std::vector<TrialRecord>(config.n_trials));

  TrialOptions options;
  options.record_info_trace = config.record_info_trace;

  parallel_for(n_cells * config.n_trials, threads, [&](std::size_t job) {
    const std::size_t cell = job / config.n_trials;
    const std::size_t trial = job % config.n_trials;
    const auto& policy = *policies[cell / config.n0_values.size()];
    const std::size_t n0 = config.n0_values[cell % config.n0_values.size()];
    TrialRecord record = run_trial(n0, policy, config.params, prior, stop,
                                   derive_trial_seed(config.master_seed, trial), options);
    if (!config.keep_histories) {
      record.epsilons = {};
    }
    result.trials[cell][trial] = std::move(record);
  });

  result.cells.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const auto& spec = config.policies[cell / config.n0_values.size()];
    const std::size_t n0 = config.n0_values[cell % config.n0_values.size()];
    EnsembleSummary s = summarize(config.params.eta, spec, n0, result.trials[cell]);
    if (n0 > 0 && config.params.eta > 0.0 && config.params.gamma > 0.0) {
      s.optimal_variance = optimal_estimator_variance(n0, config.params.eta, config.params.gamma);
    }
    result.cells.push_back(s);
  }
  return result;
}

std::vector<EnsembleSummary> sweep(const EnsembleConfig& base, const std::vector<double>& eta_values,
                                   unsigned threads) {
  if (eta_values.empty()) throw InvalidArgument("sweep: eta_values must not be empty");
  std::vector<EnsembleSummary> rows;
  for (double eta : eta_values) {
    EnsembleConfig config = base;
    config.params.eta = eta;
    config.keep_histories = false;
    config.record_info_trace = false;
    auto result = run_ensemble(config, threads);
    rows.insert(rows.end(), result.cells.begin(), result.cells.end());
  }
  return rows;
}

}  // namespace looppnr
