#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "looppnr/simulator.hpp"
#include "looppnr/statistics.hpp"

using namespace looppnr;

TEST(SampleRound, Degenerate) {
  Rng rng(1);
  SystemParams dark_free{0.99, 0.9, 0.0, 10};
  for (int i = 0; i < 1000; ++i) {
    const auto o = sample_round(0, dark_free, 0.5, rng);
    EXPECT_EQ(o.photons_left, 0u);
    EXPECT_EQ(o.click, 0);
  }
  SystemParams perfect{1.0, 0.9, 0.0, 10};
  for (int i = 0; i < 1000; ++i) {
    const auto o = sample_round(7, perfect, 0.0, rng);
    EXPECT_EQ(o.photons_left, 7u);
    EXPECT_EQ(o.click, 0);
  }
  SystemParams dump{1.0, 1.0, 0.0, 10};
  const auto o = sample_round(4, dump, 1.0, rng);
  EXPECT_EQ(o.photons_left, 0u);
  EXPECT_EQ(o.click, 1);
  EXPECT_THROW((void)sample_round(11, dump, 0.5, rng), InvalidArgument);
}

TEST(SampleRound, MatchesKernelColumn) {
  SystemParams p{0.99, 0.9, 1e-6, 5};
  const auto kernel = transition_kernel(p, 0.1);
  constexpr int kDraws = 100000;
  Matrix counts = Matrix::Zero(6, 2);
  Rng rng(2024);
  for (int i = 0; i < kDraws; ++i) {
    const auto o = sample_round(3, p, 0.1, rng);
    counts(static_cast<Eigen::Index>(o.photons_left), o.click) += 1.0;
  }
  for (Eigen::Index m = 0; m <= 5; ++m) {
    for (int d = 0; d < 2; ++d) {
      const double prob = kernel.outcome(d)(m, 3);
      const double freq = counts(m, d) / kDraws;
      const double sigma = std::sqrt(prob * (1.0 - prob) / kDraws);
      EXPECT_LE(std::abs(freq - prob), 5.0 * sigma + 1e-12) << "m=" << m << " d=" << d;
    }
  }
}

TEST(StopRule, Defaults) {
  SystemParams p{0.99, 0.9, 1e-6, 100};
  EXPECT_EQ(StopRule::default_max_rounds(p, 0.5), static_cast<std::size_t>(std::ceil(200.0 * std::log(200.0))));
  p.eta = 1.0;
  EXPECT_EQ(StopRule::default_max_rounds(p, 0.5), kRoundHardCap);
  p.eta = 0.0;
  EXPECT_EQ(StopRule::default_max_rounds(p, 0.5), static_cast<std::size_t>(std::ceil(2.0 * std::log(200.0))));
  EXPECT_THROW(StopRule::for_params(p, 0.0), InvalidArgument);
  EXPECT_THROW((StopRule{0.5, 0}).validate(), InvalidArgument);
}

TEST(RunTrial, NoPhotonsNoClicks) {
  SystemParams p{0.99, 0.9, 0.0, 20};
  const auto prior = PriorDistribution::uniform(20);
  PassivePolicy policy(p, 0.1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run_trial(0, policy, p, prior, StopRule::for_params(p), seed);
    EXPECT_EQ(r.click_count(), 0u);
    EXPECT_EQ(r.n_mle, 0u);
    EXPECT_GT(r.rounds, 0u);
    EXPECT_EQ(r.clicks.size(), r.rounds);
  }

  // Certain-empty prior: the stop check fires before the first round.
  const PriorDistribution empty(TwoPointPrior{0, 0, 1.0}, 20);
  const auto r = run_trial(0, policy, p, empty, StopRule::for_params(p), 1);
  EXPECT_EQ(r.rounds, 0u);
  EXPECT_EQ(r.n_mle, 0u);
}

TEST(RunTrial, PassiveClickCount) {
  SystemParams p{0.99, 0.9, 1e-6, 100};
  const auto prior = PriorDistribution::uniform(100);
  PassivePolicy policy(p, 0.02);
  RunningMoments clicks;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    clicks.push(static_cast<double>(run_trial(40, policy, p, prior, StopRule::for_params(p), seed).click_count()));
  }
  EXPECT_NEAR(clicks.mean(), 19.0, 2.0);
}

TEST(RunTrial, Deterministic) {
  SystemParams p{0.98, 0.9, 1e-6, 30};
  const auto prior = PriorDistribution::uniform(30);
  AdaptivePolicy policy(p, EpsilonGrid::log_spaced(0.001, 1.0, 12));
  TrialOptions options;
  options.record_info_trace = true;
  const auto a = run_trial(12, policy, p, prior, StopRule::for_params(p), 42, options);
  const auto b = run_trial(12, policy, p, prior, StopRule::for_params(p), 42, options);
  EXPECT_EQ(a.clicks, b.clicks);
  EXPECT_EQ(a.epsilons, b.epsilons);
  EXPECT_EQ(a.n_est, b.n_est);
  EXPECT_EQ(a.var_est, b.var_est);
  EXPECT_EQ(a.rounds, b.rounds);
  ASSERT_EQ(a.info_trace.size(), a.rounds);
  for (std::size_t i = 0; i < a.rounds; ++i) {
    EXPECT_EQ(a.info_trace[i].info_available, b.info_trace[i].info_available);
    EXPECT_EQ(a.info_trace[i].click, a.clicks[i]);
  }
  EXPECT_EQ(a.seed, 42u);
}

TEST(RunTrial, ObserverSeesEveryRound) {
  SystemParams p{0.95, 0.9, 1e-6, 15};
  const auto prior = PriorDistribution::uniform(15);
  PassivePolicy policy(p, 0.2);
  std::vector<std::size_t> rounds;
  TrialOptions options;
  options.observer = [&](const BeliefMatrix& b) { rounds.push_back(b.round_index()); };
  const auto r = run_trial(8, policy, p, prior, StopRule::for_params(p), 3, options);
  ASSERT_EQ(rounds.size(), r.rounds + 1);
  for (std::size_t i = 0; i < rounds.size(); ++i) EXPECT_EQ(rounds[i], i);
}

TEST(RunTrial, RoundCap) {
  SystemParams p{0.99, 0.9, 1e-6, 30};
  const auto prior = PriorDistribution::uniform(30);
  PassivePolicy policy(p, 0.001);
  const auto r = run_trial(30, policy, p, prior, StopRule{0.5, 7}, 5);
  EXPECT_EQ(r.rounds, 7u);
}

TEST(RunTrial, RejectsBadInput) {
  SystemParams p{0.99, 0.9, 1e-6, 10};
  PassivePolicy policy(p, 0.1);
  EXPECT_THROW((void)run_trial(11, policy, p, PriorDistribution::uniform(10), StopRule::for_params(p), 1),
               InvalidArgument);
  EXPECT_THROW((void)run_trial(5, policy, p, PriorDistribution::uniform(12), StopRule::for_params(p), 1),
               InvalidArgument);
}

TEST(TrialSeeds, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_trial_seed(42, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_EQ(derive_trial_seed(42, 7), derive_trial_seed(42, 7));
  EXPECT_NE(derive_trial_seed(42, 7), derive_trial_seed(43, 7));
}

TEST(RunningMoments, MatchesTwoPass) {
  const std::vector<double> xs{1e9 + 1, 1e9 + 4, 1e9 + 2, 1e9 + 8, 1e9 + 5};
  RunningMoments m;
  for (double x : xs) m.push(x);
  // Offsets 1,4,2,8,5 have mean 4 and sum of squared deviations 30.
  const double mean = 1e9 + 4;
  const double ss = 30.0;
  EXPECT_EQ(m.count(), 5u);
  EXPECT_NEAR(m.mean(), mean, 1e-6);
  EXPECT_NEAR(m.population_variance(), ss / 5.0, 1e-6);
  EXPECT_NEAR(m.sample_variance(), ss / 4.0, 1e-6);
  EXPECT_NEAR(m.standard_error(), std::sqrt(ss / 4.0 / 5.0), 1e-7);
  EXPECT_GT(m.variance_standard_error(), 0.0);

  RunningMoments single;
  single.push(3.0);
  EXPECT_EQ(single.sample_variance(), 0.0);
  EXPECT_EQ(single.standard_error(), 0.0);
}
