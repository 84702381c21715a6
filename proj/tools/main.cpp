#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "looppnr/config.hpp"
#include "looppnr/harness.hpp"
#include "looppnr/kernel.hpp"
#include "looppnr/optimal.hpp"
#include "looppnr/persistence.hpp"
#include "looppnr/simulator.hpp"

namespace fs = std::filesystem;
using namespace looppnr;

namespace {

// Flags shared by every subcommand; unset options leave the config untouched.
struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  bool trace = false;
  std::optional<double> eta, gamma, nu;
  std::optional<std::size_t> n_max;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--out-dir", f.out_dir, "Output directory");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--trials", f.trials, "Trials per cell");
  app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  app->add_flag("--trace", f.trace, "Record per-round information traces");
  app->add_option("--eta", f.eta, "Loop efficiency");
  app->add_option("--gamma", f.gamma, "Detector efficiency");
  app->add_option("--nu", f.nu, "Dark-count probability");
  app->add_option("--n-max", f.n_max, "Photon-number cutoff");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_run_config(f.config_path);
  EnsembleConfig& e = c.ensemble;
  if (f.out_dir) c.output_dir = *f.out_dir;
  if (f.seed) e.master_seed = *f.seed;
  if (f.trials) e.n_trials = *f.trials;
  if (f.threads) c.threads = *f.threads;
  if (f.trace) e.record_info_trace = true;
  if (f.eta) e.params.eta = *f.eta;
  if (f.gamma) e.params.gamma = *f.gamma;
  if (f.nu) e.params.nu = *f.nu;
  if (f.n_max) e.params.n_max = *f.n_max;
  return c;
}

std::string cell_file(std::size_t cell, const char* kind) {
  return "cell" + std::to_string(cell) + "_" + kind + ".csv";
}

int cmd_kernel_dump(const CommonFlags& f, double epsilon, const std::string& out) {
  RunConfig c = resolve(f);
  c.ensemble.params.validate();
  require_probability(epsilon, "epsilon");
  const fs::path path = out.empty() ? fs::path(c.output_dir) / "kernel.csv" : fs::path(out);
  write_kernel_csv(path, transition_kernel(c.ensemble.params, epsilon));
  std::cout << path.string() << '\n';
  return 0;
}

int cmd_trial(const CommonFlags& f, std::optional<std::size_t> n0, std::optional<double> epsilon,
              bool dump_belief) {
  RunConfig c = resolve(f);
  EnsembleConfig& e = c.ensemble;
  if (n0) e.n0_values = {*n0};
  if (epsilon) e.policies = {PolicySpec::passive(*epsilon)};
  if (dump_belief) c.dump_belief = true;
  e.n_trials = 1;
  c.validate();

  const fs::path dir = c.output_dir;
  const PriorDistribution prior(e.prior, e.params.n_max);
  KernelCache cache(e.params);
  const auto policy = e.policies.front().build(cache);

  std::optional<BeliefCsvWriter> dump;
  if (c.dump_belief) dump.emplace(dir / "belief.csv", e.params.dimension());
  TrialOptions options;
  options.record_info_trace = true;
  if (dump) options.observer = [&](const BeliefMatrix& b) { dump->write(b); };

  const std::uint64_t seed = derive_trial_seed(e.master_seed, 0);
  TrialRecord record = run_trial(e.n0_values.front(), *policy, e.params, prior, e.stop_rule(), seed, options);
  write_trials_csv(dir / "trial.csv", {record});
  write_info_trace_csv(dir / "trace.csv", {record});
  std::cout << "n0=" << record.n0_true << " n_est=" << format_double(record.n_est)
            << " n_mle=" << record.n_mle << " rounds=" << record.rounds << " clicks=" << record.click_count()
            << '\n';
  return 0;
}

int cmd_ensemble(const CommonFlags& f, const std::vector<std::size_t>& n0_values) {
  RunConfig c = resolve(f);
  if (!n0_values.empty()) c.ensemble.n0_values = n0_values;
  c.validate();

  const fs::path dir = c.output_dir;
  const EnsembleResult result = run_ensemble(c.ensemble, c.threads);
  std::vector<std::string> files;
  for (std::size_t cell = 0; cell < result.cells.size(); ++cell) {
    files.push_back(cell_file(cell, "trials"));
    write_trials_csv(dir / files.back(), result.trials[cell]);
    if (c.ensemble.record_info_trace) write_info_trace_csv(dir / cell_file(cell, "trace"), result.trials[cell]);
  }
  write_summary_json(dir / "summary.json", c, result.cells, files);
  write_summary_csv(dir / "summary.csv", result.cells);
  for (const auto& s : result.cells) {
    std::cout << s.policy.label() << " n0=" << s.n0 << " mse=" << format_double(s.mse.value)
              << " bias=" << format_double(s.bias.value) << " rounds=" << format_double(s.mean_rounds.value)
              << '\n';
  }
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::vector<std::size_t>& n0_values, const std::vector<double>& etas) {
  RunConfig c = resolve(f);
  if (!n0_values.empty()) c.ensemble.n0_values = n0_values;
  if (!etas.empty()) c.eta_values = etas;
  if (c.eta_values.empty()) c.eta_values = {c.ensemble.params.eta};
  c.validate();

  const fs::path dir = c.output_dir;
  const auto cells = sweep(c.ensemble, c.eta_values, c.threads);
  write_summary_json(dir / "summary.json", c, cells);
  write_summary_csv(dir / "summary.csv", cells);
  std::cout << cells.size() << " cells written to " << dir.string() << '\n';
  return 0;
}

int cmd_optimal(const CommonFlags& f, std::size_t lo, std::size_t hi, std::size_t step, const std::string& out) {
  RunConfig c = resolve(f);
  const SystemParams& p = c.ensemble.params;
  require_probability(p.eta, "eta");
  require_probability(p.gamma, "gamma");
  if (!(p.gamma > 0.0)) throw InvalidArgument("optimal: gamma must be positive");
  if (lo < 1 || hi < lo || step < 1) throw InvalidArgument("optimal: require 1 <= n0-min <= n0-max and n0-step >= 1");

  const fs::path path = out.empty() ? fs::path(c.output_dir) / "optimal.csv" : fs::path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw PersistenceError("cannot open " + path.string() + " for writing");
  file << "n0,eta,gamma,mean_clicks,click_variance,estimator_variance,small_loss_variance,large_loss_variance\n";
  for (std::size_t n0 = lo; n0 <= hi; n0 += step) {
    file << n0 << ',' << format_double(p.eta) << ',' << format_double(p.gamma) << ','
         << format_double(optimal_mean_clicks(n0, p.eta, p.gamma)) << ','
         << format_double(optimal_click_variance(n0, p.eta, p.gamma)) << ','
         << format_double(optimal_estimator_variance(n0, p.eta, p.gamma)) << ','
         << format_double(optimal_estimator_variance_small_loss(n0, p.gamma)) << ','
         << format_double(optimal_estimator_variance_large_loss(n0, p.eta, p.gamma)) << '\n';
  }
  if (!file) throw PersistenceError("write failed for " + path.string());
  std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-based photon-number-resolving detector simulator"};
  app.require_subcommand(1);

  CommonFlags kernel_flags, trial_flags, ensemble_flags, sweep_flags, optimal_flags;

  auto* kernel = app.add_subcommand("kernel-dump", "Write R(0) and R(1) for one outcoupling rate");
  add_common(kernel, kernel_flags);
  double kernel_epsilon = 0.0;
  std::string kernel_out;
  kernel->add_option("--epsilon", kernel_epsilon, "Outcoupling rate")->required();
  kernel->add_option("--out", kernel_out, "Output file (default <out-dir>/kernel.csv)");

  auto* trial = app.add_subcommand("trial", "Run one trial and export its trace");
  add_common(trial, trial_flags);
  std::optional<std::size_t> trial_n0;
  std::optional<double> trial_epsilon;
  bool trial_dump = false;
  trial->add_option("--n0", trial_n0, "True initial photon number");
  trial->add_option("--epsilon", trial_epsilon, "Use a passive policy with this rate");
  trial->add_flag("--dump-belief", trial_dump, "Write the belief matrix after every round");

  auto* ensemble = app.add_subcommand("ensemble", "Run every (policy, n0) cell of the configuration");
  add_common(ensemble, ensemble_flags);
  std::vector<std::size_t> ensemble_n0;
  ensemble->add_option("--n0", ensemble_n0, "True initial photon numbers");

  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat the ensemble over loop efficiencies");
  add_common(sweep_cmd, sweep_flags);
  std::vector<std::size_t> sweep_n0;
  std::vector<double> sweep_etas;
  sweep_cmd->add_option("--n0", sweep_n0, "True initial photon numbers");
  sweep_cmd->add_option("--eta-values", sweep_etas, "Loop efficiencies to visit");

  auto* optimal = app.add_subcommand("optimal", "Tabulate the idealized-detector baseline");
  add_common(optimal, optimal_flags);
  std::size_t n0_min = 1, n0_max = 100, n0_step = 1;
  std::string optimal_out;
  optimal->add_option("--n0-min", n0_min, "First n0");
  optimal->add_option("--n0-max", n0_max, "Last n0");
  optimal->add_option("--n0-step", n0_step, "n0 increment");
  optimal->add_option("--out", optimal_out, "Output file (default <out-dir>/optimal.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kernel->parsed()) return cmd_kernel_dump(kernel_flags, kernel_epsilon, kernel_out);
    if (trial->parsed()) return cmd_trial(trial_flags, trial_n0, trial_epsilon, trial_dump);
    if (ensemble->parsed()) return cmd_ensemble(ensemble_flags, ensemble_n0);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_n0, sweep_etas);
    if (optimal->parsed()) return cmd_optimal(optimal_flags, n0_min, n0_max, n0_step, optimal_out);
  } catch (const std::exception& e) {
    std::cerr << "looppnr: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
