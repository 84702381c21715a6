#include "looppnr/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "looppnr/information.hpp"

namespace looppnr {

EpsilonGrid::EpsilonGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidArgument("epsilon grid needs at least one candidate");
  }
  std::sort(values_.begin(), values_.end());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] <= 1.0)) {
      throw InvalidArgument("epsilon grid values must lie in (0, 1]");
    }
    if (i > 0 && values_[i] == values_[i - 1]) {
      throw InvalidArgument("epsilon grid values must be distinct");
    }
  }
}

EpsilonGrid EpsilonGrid::log_spaced(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && lo < hi && hi <= 1.0)) {
    throw InvalidArgument("log_spaced grid requires 0 < lo < hi <= 1");
  }
  if (points < 2) {
    throw InvalidArgument("log_spaced grid requires at least 2 points");
  }
  std::vector<double> values(points);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < points; ++i) {
    values[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  values.front() = lo;
  values.back() = hi;
  return EpsilonGrid(std::move(values));
}

std::pair<double, double> predict_outcome_probs(const BeliefMatrix& belief, const TransitionKernel& kernel) {
  if (kernel.dimension() != belief.dimension()) {
    throw InvalidArgument("predict_outcome_probs: kernel dimension does not match belief");
  }
  const Vector loop = marginal_nk(belief);
  const double q0 = kernel.r0.colwise().sum().dot(loop.transpose());
  const double q1 = kernel.r1.colwise().sum().dot(loop.transpose());
  return {q0, q1};
}

PassivePolicy::PassivePolicy(KernelCache& cache, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("passive policy: epsilon must lie in (0, 1]; photons would never leave the loop");
  }
  kernel_ = cache.get(epsilon);
}

PassivePolicy::PassivePolicy(const SystemParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("passive policy: epsilon must lie in (0, 1]; photons would never leave the loop");
  }
  kernel_ = std::make_shared<const TransitionKernel>(transition_kernel(params, epsilon));
}

PolicyDecision PassivePolicy::choose(const BeliefMatrix& belief) const {
  const auto [q0, q1] = predict_outcome_probs(belief, *kernel_);
  (void)q0;
  return {kernel_->epsilon, std::numeric_limits<double>::quiet_NaN(), std::clamp(q1, 0.0, 1.0), 0};
}

std::string PassivePolicy::label() const {
  std::ostringstream out;
  out << "passive(" << kernel_->epsilon << ")";
  return out.str();
}

AdaptivePolicy::AdaptivePolicy(KernelCache& cache, EpsilonGrid grid, double negligible)
    : grid_(std::move(grid)), negligible_(negligible) {
  kernels_.reserve(grid_.size());
  for (double eps : grid_.values()) {
    kernels_.push_back(cache.get(eps));
  }
}

AdaptivePolicy::AdaptivePolicy(const SystemParams& params, EpsilonGrid grid, double negligible)
    : grid_(std::move(grid)), negligible_(negligible) {
  kernels_.reserve(grid_.size());
  for (double eps : grid_.values()) {
    kernels_.push_back(std::make_shared<const TransitionKernel>(transition_kernel(params, eps)));
  }
}

std::vector<CandidateScore> AdaptivePolicy::score_all(const BeliefMatrix& belief) const {
  if (belief.dimension() != kernels_.front()->dimension()) {
    throw InvalidArgument("adaptive policy: belief dimension does not match kernels");
  }
  const Matrix& joint = belief.joint();
  const Vector& prior = belief.prior().weights();
  const InformationPair now = information_of(joint, 1.0, prior, negligible_);

  std::vector<CandidateScore> scores;
  scores.reserve(kernels_.size());
  Matrix branch[2];
  for (const auto& kernel : kernels_) {
    const auto [m0, m1] = propagate_both(*kernel, joint, branch[0], branch[1], negligible_);
    const double masses[2] = {m0, m1};
    const double total = m0 + m1;

    CandidateScore s;
    s.epsilon = kernel->epsilon;
    s.click_prob = std::clamp(m1 / total, 0.0, 1.0);
    for (int d = 0; d < 2; ++d) {
      // an outcome that cannot happen contributes nothing to the expectation
      if (masses[d] < kMassFloor) continue;
      const double weight = masses[d] / total;
      const InformationPair next = information_of(branch[d], masses[d], prior, negligible_);
      s.expected_gained += weight * next.gained;
      s.expected_available += weight * next.available;
    }
    s.score = std::abs(s.expected_gained - now.gained) /
              (std::abs(s.expected_available - now.available) + kDenominatorFloor);
    scores.push_back(s);
  }
  return scores;
}

PolicyDecision AdaptivePolicy::choose(const BeliefMatrix& belief) const {
  const auto scores = score_all(belief);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].score > scores[best].score) best = i;
  }
  return {scores[best].epsilon, scores[best].score, scores[best].click_prob, best};
}

const TransitionKernel& AdaptivePolicy::kernel(const PolicyDecision& decision) const {
  if (decision.kernel_index >= kernels_.size()) {
    throw InvalidArgument("adaptive policy: decision does not refer to a grid kernel");
  }
  return *kernels_[decision.kernel_index];
}

}  // namespace looppnr
