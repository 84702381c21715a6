// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   looppnr_acceptance [--full] [--threads N] [--only NAME]
//
// --full runs the dynamic-range and trade-off cells with 1000 trials and
// strict bounds instead of the 200-trial smoke variant with 2-sigma bands.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "looppnr/binomial.hpp"
#include "looppnr/harness.hpp"
#include "looppnr/information.hpp"
#include "looppnr/optimal.hpp"
#include "looppnr/simulator.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace looppnr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

const SystemParams kPaper{0.99, 0.9, 1e-6, 100};
constexpr std::uint64_t kMasterSeed = 42;
const std::vector<double> kPassiveSweep{0.01, 0.02, 0.05, 0.1};

unsigned g_threads = 0;

// Ensemble cells are shared between criteria. Trial t always uses
// derive_trial_seed(kMasterSeed, t), so a shorter run is a prefix of a longer one.
std::map<std::tuple<double, std::string, std::size_t>, std::vector<TrialRecord>> g_cells;

EnsembleSummary cell(double eta, const PolicySpec& policy, std::size_t n0, std::size_t trials) {
  auto& records = g_cells[{eta, policy.label(), n0}];
  if (records.size() < trials) {
    EnsembleConfig c;
    c.params = kPaper;
    c.params.eta = eta;
    c.policies = {policy};
    c.n0_values = {n0};
    c.n_trials = trials;
    c.master_seed = kMasterSeed;
    records = run_ensemble(c, g_threads).trials.front();
  }
  const std::vector<TrialRecord> prefix(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(trials));
  return summarize(eta, policy, n0, prefix);
}

double combined(double a, double b) { return std::hypot(a, b); }

// ---------------------------------------------------------------------------

Verdict kernel_oracle() {
  double worst = 0.0;
  int cases = 0;
  for (double eps : {0.0, 0.01, 0.1, 0.5, 1.0}) {
    for (double gamma : {0.5, 0.9, 1.0}) {
      for (double eta : {0.9, 0.99, 1.0}) {
        for (double nu : {0.0, 1e-6, 0.01}) {
          const SystemParams p{eta, gamma, nu, 6};
          const auto closed = transition_kernel(p, eps);
          const auto enumerated = enumerate_kernel(p, eps, 6);
          worst = std::max({worst, max_abs(closed.r0, enumerated.r0), max_abs(closed.r1, enumerated.r1)});
          ++cases;
        }
      }
    }
  }
  return {worst < 1e-12, fmt("%d parameter sets, max |closed - enumerated| = %.3g (tol 1e-12)", cases, worst)};
}

Verdict binomial_identities() {
  const std::vector<double> grid{0.0, 0.1, 0.5, 0.9, 1.0};
  double conv = 0.0, tilt = 0.0, refl = 0.0;
  for (std::size_t n = 0; n <= 8; ++n) {
    for (double p : grid) {
      for (std::size_t m = 0; m <= n; ++m) {
        refl = std::max(refl, std::abs(binomial_pmf(m, n, p) - binomial_pmf(n - m, n, 1.0 - p)));
      }
      for (double q : grid) {
        for (std::size_t m = 0; m <= n; ++m) {
          double lhs = 0.0;
          for (std::size_t k = m; k <= n; ++k) lhs += binomial_pmf(k, n, p) * binomial_pmf(m, k, q);
          conv = std::max(conv, std::abs(lhs - binomial_pmf(m, n, p * q)));
          if (p * q < 1.0) {
            const double a = std::pow(q, static_cast<double>(m)) * binomial_pmf(m, n, p);
            const double b =
                std::pow((1.0 - p) / (1.0 - p * q), static_cast<double>(n - m)) * binomial_pmf(m, n, p * q);
            tilt = std::max(tilt, std::abs(a - b));
          }
        }
      }
    }
  }
  const double worst = std::max({conv, tilt, refl});
  return {worst < 1e-12,
          fmt("n<=8, p,q in {0,0.1,0.5,0.9,1}: convolution %.3g, tilt %.3g, reflection %.3g (tol 1e-12)", conv, tilt,
              refl)};
}

Verdict normalization() {
  double column = 0.0;
  for (const SystemParams& p : {kPaper, SystemParams{0.9, 0.5, 0.01, 100}, SystemParams{1.0, 1.0, 0.0, 100}}) {
    for (double eps : {0.0, 0.001, 0.02, 0.3, 1.0}) {
      const auto k = transition_kernel(p, eps);
      column = std::max(column, ((k.r0 + k.r1).colwise().sum().array() - 1.0).abs().maxCoeff());
    }
  }

  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KernelCache cache(kPaper);
  const auto grid = EpsilonGrid::standard().values();
  const auto prior = PriorDistribution::uniform(kPaper.n_max);
  double mass = 0.0;
  double below = 0.0;
  double negative = 0.0;
  for (int seq = 0; seq < 10000; ++seq) {
    auto belief = init_belief(prior);
    const int length = 1 + static_cast<int>(unit(rng) * 10);
    for (int r = 0; r < length; ++r) {
      const auto kernel = cache.get(grid[static_cast<std::size_t>(unit(rng) * grid.size())]);
      const double click_prob = predict_outcome_probs(belief, *kernel).second;
      belief.apply(*kernel, unit(rng) < click_prob ? 1 : 0);
      const Matrix& j = belief.joint();
      mass = std::max(mass, std::abs(j.sum() - 1.0));
      below = std::max(below, j.triangularView<Eigen::StrictlyLower>().toDenseMatrix().cwiseAbs().maxCoeff());
      negative = std::min(negative, j.minCoeff());
    }
  }
  const bool ok = column < 1e-12 && mass < 1e-9 && below == 0.0 && negative >= 0.0;
  return {ok, fmt("kernel column error %.3g (tol 1e-12); 1e4 sequences: mass error %.3g (tol 1e-9), "
                  "sub-diagonal max %.3g, min entry %.3g",
                  column, mass, below, negative)};
}

Verdict sampler() {
  constexpr int kDraws = 100000;
  double worst_ratio = 0.0;
  std::string where;
  struct Case {
    SystemParams p;
    std::size_t n;
    double eps;
  };
  for (const Case& c : {Case{{0.99, 0.9, 1e-6, 5}, 3, 0.1}, Case{{0.95, 0.7, 0.01, 20}, 12, 0.4},
                        Case{{0.99, 0.9, 1e-6, 100}, 40, 0.02}}) {
    const auto kernel = transition_kernel(c.p, c.eps);
    Rng rng(derive_trial_seed(7, c.n));
    Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(c.p.n_max + 1), 2);
    for (int i = 0; i < kDraws; ++i) {
      const auto o = sample_round(c.n, c.p, c.eps, rng);
      counts(static_cast<Eigen::Index>(o.photons_left), o.click) += 1.0;
    }
    for (Eigen::Index m = 0; m <= static_cast<Eigen::Index>(c.n); ++m) {
      for (int d = 0; d < 2; ++d) {
        const double p = kernel.outcome(d)(m, static_cast<Eigen::Index>(c.n));
        const double sigma = std::sqrt(p * (1.0 - p) / kDraws);
        const double dev = std::abs(counts(m, d) / kDraws - p);
        const double ratio = sigma > 0.0 ? dev / sigma : (dev > 0.0 ? INFINITY : 0.0);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          where = fmt("n=%zu eps=%g m=%ld d=%d", c.n, c.eps, static_cast<long>(m), d);
        }
      }
    }
  }
  return {worst_ratio <= 5.0, fmt("3 columns x 1e5 draws: worst deviation %.2f sigma at %s (tol 5 sigma)", worst_ratio,
                                  where.c_str())};
}

Verdict path_sum() {
  double worst = 0.0;
  int sequences = 0;
  for (std::size_t n_max = 1; n_max <= 6; ++n_max) {
    for (const SystemParams base : {SystemParams{0.99, 0.9, 1e-6, 0}, SystemParams{0.9, 0.6, 0.02, 0}}) {
      SystemParams p = base;
      p.n_max = n_max;
      for (std::size_t length = 1; length <= 4; ++length) {
        for (unsigned bits = 0; bits < (1u << length); ++bits) {
          std::vector<int> clicks(length);
          std::vector<double> eps(length);
          for (std::size_t r = 0; r < length; ++r) {
            clicks[r] = static_cast<int>((bits >> r) & 1u);
            eps[r] = 0.05 + 0.3 * static_cast<double>(r);
          }
          const auto prior = PriorDistribution(PoissonPrior{2.0}, n_max);
          auto belief = init_belief(prior);
          for (std::size_t r = 0; r < length; ++r) belief.apply(transition_kernel(p, eps[r]), clicks[r]);
          Matrix reference = oracle::path_sum_joint(p, eps, clicks, to_vector(prior.weights()));
          reference /= reference.sum();
          const Vector n0 = reference.colwise().sum().transpose();
          const Vector nk = reference.rowwise().sum();
          worst = std::max({worst, (marginal_n0(belief) - n0).cwiseAbs().maxCoeff(),
                            (marginal_nk(belief) - nk).cwiseAbs().maxCoeff()});
          ++sequences;
        }
      }
    }
  }
  return {worst < 1e-10, fmt("%d click sequences, n_max<=6, length<=4: max marginal error %.3g (tol 1e-10)",
                             sequences, worst)};
}

Verdict fig3() {
  const auto passive = cell(0.99, PolicySpec::passive(0.02), 40, 1000);
  const auto adaptive = cell(0.99, PolicySpec::adaptive(), 40, 1000);
  const bool p_ok = passive.bias.value >= 1.2 && passive.bias.value <= 2.2 && passive.mse.value >= 32.0 &&
                    passive.mse.value <= 56.0;
  const bool a_ok = adaptive.bias.value >= 0.9 && adaptive.bias.value <= 1.9 && adaptive.mse.value >= 26.0 &&
                    adaptive.mse.value <= 46.0;
  const double diff = passive.mse.value - adaptive.mse.value;
  const double se = combined(passive.mse.standard_error, adaptive.mse.standard_error);
  const char* comparison = diff >= 2.0 * se ? "adaptive lower by >= 2 SE" : diff > -2.0 * se ? "within noise" : "adaptive worse by > 2 SE";
  return {p_ok && a_ok && diff > -2.0 * se,
          fmt("passive(0.02): bias %.3f +- %.3f [1.2,2.2], MSE %.2f +- %.2f [32,56]; adaptive: bias %.3f +- %.3f "
              "[0.9,1.9], MSE %.2f +- %.2f [26,46]; MSE difference %.2f +- %.2f (%s); rounds %.1f vs %.1f",
              passive.bias.value, passive.bias.standard_error, passive.mse.value, passive.mse.standard_error,
              adaptive.bias.value, adaptive.bias.standard_error, adaptive.mse.value, adaptive.mse.standard_error, diff,
              se, comparison, passive.mean_rounds.value, adaptive.mean_rounds.value)};
}

Verdict info_bookkeeping() {
  const auto prior = PriorDistribution::uniform(kPaper.n_max);
  const auto start = init_belief(prior);
  const double g0 = info_gained(start);
  const double a0 = info_available(start);
  const double a0_err = std::abs(a0 - std::log2(101.0));

  // Run past the usual stop threshold so every trial ends with < 0.05 photons expected.
  KernelCache cache(kPaper);
  PassivePolicy passive(cache, 0.02);
  AdaptivePolicy adaptive(cache, EpsilonGrid::standard());
  const StopRule stop{0.05, StopRule::default_max_rounds(kPaper, 0.05)};
  double worst = 0.0;
  int trials = 0;
  for (const OutcouplingPolicy* policy : {static_cast<const OutcouplingPolicy*>(&passive),
                                          static_cast<const OutcouplingPolicy*>(&adaptive)}) {
    const int count = policy == &passive ? 40 : 8;
    for (int t = 0; t < count; ++t) {
      TrialOptions options;
      options.record_info_trace = true;
      const auto r = run_trial(10 + 10 * static_cast<std::size_t>(t % 8), *policy, kPaper, prior, stop,
                               derive_trial_seed(kMasterSeed, static_cast<std::uint64_t>(t)), options);
      const auto& last = r.info_trace.back();
      if (last.expected_loop_photons >= 0.05) continue;
      worst = std::max(worst, std::abs(last.info_available - last.info_gained));
      ++trials;
    }
  }
  const bool ok = g0 == 0.0 && a0_err <= 1e-12 && trials == 48 && worst < 0.05;
  return {ok, fmt("I_G,0 = %g; I_A,0 = %.12f bits (|err| %.2g, tol 1e-12); %d finished trials, max |I_A - I_G| "
                  "= %.4f bits (tol 0.05)",
                  g0, a0, a0_err, trials, worst)};
}

Verdict optimal_baseline() {
  double worst = 0.0;
  for (double eta : {0.5, 0.9, 0.99, 0.999, 1.0}) {
    for (double gamma : {0.5, 0.9, 1.0}) {
      for (std::size_t n0 = 1; n0 <= 200; ++n0) {
        const auto [mean, var] = oracle::optimal_series(n0, eta, gamma);
        auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); };
        worst = std::max(worst, rel(optimal_mean_clicks(n0, eta, gamma), mean));
        if (var > 1e-300) {
          worst = std::max(worst, rel(optimal_click_variance(n0, eta, gamma), var));
          const double est = static_cast<double>(n0 * n0) / (mean * mean) * var;
          worst = std::max(worst, rel(optimal_estimator_variance(n0, eta, gamma), est));
        }
      }
    }
  }
  const double small = std::abs(optimal_estimator_variance(5, 0.999, 0.9) / optimal_estimator_variance_small_loss(5, 0.9) - 1.0);
  const double large =
      std::abs(optimal_estimator_variance(100, 0.9, 0.9) / optimal_estimator_variance_large_loss(100, 0.9, 0.9) - 1.0);
  return {worst < 1e-12 && small < 0.02 && large < 0.05,
          fmt("closed forms vs series, n0<=200: max relative error %.3g (tol 1e-12); small-loss regime %.4f%% "
              "(tol 2%%); large-loss regime %.4f%% (tol 5%%)",
              worst, 100.0 * small, 100.0 * large)};
}

Verdict dynamic_range(bool full) {
  const std::size_t trials = full ? 1000 : 200;
  const double band = full ? 0.0 : 2.0;
  bool ok = true;
  std::string detail = fmt("%zu trials%s:", trials, full ? "" : ", 2-sigma bands");
  for (std::size_t n0 : {10u, 40u, 90u}) {
    const auto a = cell(0.99, PolicySpec::adaptive(), n0, trials);
    EnsembleSummary best;
    best.mse.value = INFINITY;
    for (double eps : kPassiveSweep) {
      const auto p = cell(0.99, PolicySpec::passive(eps), n0, trials);
      if (p.mse.value < best.mse.value) best = p;
    }
    const bool shot = a.mse.value - band * a.mse.standard_error < static_cast<double>(n0);
    const bool rel = a.mse.value <= 1.2 * best.mse.value + band * combined(a.mse.standard_error, 1.2 * best.mse.standard_error);
    ok = ok && shot && rel;
    detail += fmt(" n0=%zu adaptive MSE %.2f +- %.2f (shot %zu%s), best passive %s %.2f +- %.2f (ratio %.2f%s);", n0,
                  a.mse.value, a.mse.standard_error, n0, shot ? "" : " FAIL", best.policy.label().c_str(),
                  best.mse.value, best.mse.standard_error, a.mse.value / best.mse.value, rel ? "" : " FAIL");
  }
  return {ok, detail};
}

Verdict tradeoff(bool full) {
  const std::size_t trials = full ? 1000 : 200;
  bool ok = true;
  std::string detail = fmt("%zu trials:", trials);
  for (double eta : {0.9, 0.99}) {
    for (std::size_t n0 : {40u, 90u}) {
      const auto a = cell(eta, PolicySpec::adaptive(), n0, trials);
      std::string beaten;
      for (double eps : kPassiveSweep) {
        const auto p = cell(eta, PolicySpec::passive(eps), n0, trials);
        const bool better_mse = a.mse.value - p.mse.value > 2.0 * combined(a.mse.standard_error, p.mse.standard_error);
        const bool fewer_rounds = a.mean_rounds.value - p.mean_rounds.value >
                                  2.0 * combined(a.mean_rounds.standard_error, p.mean_rounds.standard_error);
        if (better_mse && fewer_rounds) beaten += " " + p.policy.label();
      }
      ok = ok && beaten.empty();
      detail += fmt(" (eta %.2f, n0 %zu) adaptive MSE %.2f rounds %.1f%s%s;", eta, n0, a.mse.value,
                    a.mean_rounds.value, beaten.empty() ? "" : " dominated by", beaten.c_str());
    }
  }
  return {ok, detail};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "looppnr_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({
    "params": {"eta": 0.99, "gamma": 0.9, "nu": 1e-6, "n_max": 60},
    "policies": [{"kind": "passive", "epsilon": 0.02}, {"kind": "adaptive", "grid_points": 20}],
    "n0_values": [0, 15, 45],
    "n_trials": 16,
    "master_seed": 42
  })";
  std::vector<std::string> runs;
  for (unsigned threads : {1u, 2u, 5u}) {
    const fs::path out = dir / ("t" + std::to_string(threads));
    const std::string cmd = std::string(LOOPPNR_CLI_PATH) + " ensemble --trace --config " + (dir / "run.json").string() +
                            " --threads " + std::to_string(threads) + " --out-dir " + out.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "ensemble subcommand failed"};
    std::string payload;
    for (int c = 0; c < 6; ++c) {
      payload += slurp(out / ("cell" + std::to_string(c) + "_trials.csv"));
      payload += slurp(out / ("cell" + std::to_string(c) + "_trace.csv"));
    }
    payload += slurp(out / "summary.csv");
    runs.push_back(payload);
  }
  const bool same = runs[0] == runs[1] && runs[1] == runs[2] && !runs[0].empty();
  return {same, fmt("ensemble CSVs at --threads 1, 2, 5: %s (%zu bytes)", same ? "byte-identical" : "DIFFER",
                    runs[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full") {
      full = true;
    } else if (arg == "--threads" && i + 1 < argc) {
      g_threads = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--full] [--threads N] [--only NAME]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"kernel-oracle", kernel_oracle},
      {"binomial-identities", binomial_identities},
      {"normalization-triangularity", normalization},
      {"sampler-fidelity", sampler},
      {"path-sum-oracle", path_sum},
      {"fig3-reproduction", fig3},
      {"information-bookkeeping", info_bookkeeping},
      {"optimal-baseline", optimal_baseline},
      {"dynamic-range", [full] { return dynamic_range(full); }},
      {"tradeoff-dominance", [full] { return tradeoff(full); }},
      {"determinism", determinism},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && only != name) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), secs, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
