#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "looppnr/belief.hpp"
#include "looppnr/kernel.hpp"

namespace looppnr {

/// Candidate outcoupling rates searched by the adaptive policy.
class EpsilonGrid {
 public:
  /// Sorts `values`; throws InvalidArgument on duplicates, an empty list, or
  /// any value outside (0, 1]. A single point degenerates to a fixed rate.
  explicit EpsilonGrid(std::vector<double> values);

  /// `points` log-spaced rates from `lo` to `hi` inclusive.
  static EpsilonGrid log_spaced(double lo, double hi, std::size_t points);
  /// 50 log-spaced points on [0.001, 1].
  static EpsilonGrid standard() { return log_spaced(0.001, 1.0, 50); }

  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct PolicyDecision {
  double epsilon = 0.0;
  /// Gain/loss ratio at the chosen rate; NaN for policies that do not score.
  double score = 0.0;
  double predicted_click_prob = 0.0;
  /// Index of the kernel the policy will hand back for this decision.
  std::size_t kernel_index = 0;
};

/// Probability of no click and of a click in the next round under `belief`.
[[nodiscard]] std::pair<double, double> predict_outcome_probs(const BeliefMatrix& belief,
                                                              const TransitionKernel& kernel);

/// Chooses the outcoupling rate for the next round.
///
/// Implementations are immutable after construction and safe to share
/// between threads.
class OutcouplingPolicy {
 public:
  virtual ~OutcouplingPolicy() = default;

  [[nodiscard]] virtual PolicyDecision choose(const BeliefMatrix& belief) const = 0;
  [[nodiscard]] virtual const TransitionKernel& kernel(const PolicyDecision& decision) const = 0;
  [[nodiscard]] virtual std::string label() const = 0;
};

/// Constant outcoupling fixed before the run.
class PassivePolicy final : public OutcouplingPolicy {
 public:
  PassivePolicy(KernelCache& cache, double epsilon);
  PassivePolicy(const SystemParams& params, double epsilon);

  [[nodiscard]] PolicyDecision choose(const BeliefMatrix& belief) const override;
  [[nodiscard]] const TransitionKernel& kernel(const PolicyDecision&) const override { return *kernel_; }
  [[nodiscard]] std::string label() const override;
  [[nodiscard]] double epsilon() const noexcept { return kernel_->epsilon; }

 private:
  std::shared_ptr<const TransitionKernel> kernel_;
};

/// Score of one candidate rate, exposed for diagnostics and tests.
struct CandidateScore {
  double epsilon = 0.0;
  double click_prob = 0.0;
  double expected_gained = 0.0;
  double expected_available = 0.0;
  double score = 0.0;
};

/// Greedy one-round lookahead: picks the rate maximizing
/// |<I_G> - I_G| / (|<I_A> - I_A| + delta), expectations over the next click.
class AdaptivePolicy final : public OutcouplingPolicy {
 public:
  /// Floor added to the information-loss denominator.
  static constexpr double kDenominatorFloor = 1e-12;
  /// Joint entries at or below this are skipped while scoring candidates.
  static constexpr double kDefaultNegligible = 1e-20;

  AdaptivePolicy(KernelCache& cache, EpsilonGrid grid, double negligible = kDefaultNegligible);
  AdaptivePolicy(const SystemParams& params, EpsilonGrid grid, double negligible = kDefaultNegligible);

  [[nodiscard]] PolicyDecision choose(const BeliefMatrix& belief) const override;
  [[nodiscard]] const TransitionKernel& kernel(const PolicyDecision& decision) const override;
  [[nodiscard]] std::string label() const override { return "adaptive"; }

  /// Every candidate's score, in grid order.
  [[nodiscard]] std::vector<CandidateScore> score_all(const BeliefMatrix& belief) const;

  [[nodiscard]] const EpsilonGrid& grid() const noexcept { return grid_; }

 private:
  EpsilonGrid grid_;
  std::vector<std::shared_ptr<const TransitionKernel>> kernels_;
  double negligible_;
};

}  // namespace looppnr
