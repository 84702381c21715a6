#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <utility>

#include "looppnr/kernel.hpp"
#include "looppnr/prior.hpp"

namespace looppnr {

/// The observed click record has (numerically) zero probability under the model.
class AllMassLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unnormalized mass below this is treated as annihilated by an update.
inline constexpr double kMassFloor = 1e-300;

/// Joint posterior P(N_k = m, N_0 = n | clicks so far), stored as joint(m, n).
///
/// The matrix is upper triangular since photons are never created, and is
/// renormalized to unit mass after every update.
class BeliefMatrix {
 public:
  /// Round-0 belief: the prior on the diagonal.
  explicit BeliefMatrix(std::shared_ptr<const PriorDistribution> prior);

  /// Adopts an arbitrary joint (normalized here). Throws InvalidArgument if it
  /// is not square, has negative or sub-diagonal mass, or has no mass at all.
  static BeliefMatrix from_joint(Matrix joint, std::shared_ptr<const PriorDistribution> prior,
                                 std::size_t round_index = 0);

  [[nodiscard]] const Matrix& joint() const noexcept { return joint_; }
  [[nodiscard]] std::size_t round_index() const noexcept { return round_; }
  [[nodiscard]] const PriorDistribution& prior() const noexcept { return *prior_; }
  [[nodiscard]] const std::shared_ptr<const PriorDistribution>& shared_prior() const noexcept { return prior_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(joint_.rows()); }

  /// In-place Bayes step: joint <- R(click) * joint, renormalized.
  /// Throws AllMassLost (leaving the belief untouched) if the click is impossible.
  void apply(const TransitionKernel& kernel, int click);

 private:
  BeliefMatrix(Matrix joint, std::shared_ptr<const PriorDistribution> prior, std::size_t round);

  Matrix joint_;
  std::size_t round_ = 0;
  std::shared_ptr<const PriorDistribution> prior_;
  Matrix scratch_;
};

[[nodiscard]] BeliefMatrix init_belief(const PriorDistribution& prior);
[[nodiscard]] BeliefMatrix update(const BeliefMatrix& belief, const TransitionKernel& kernel, int click);

/// out = transition * joint for upper-triangular operands; returns the total
/// mass of `out`. Rows and columns of `joint` with no entry above `negligible`
/// are skipped.
double propagate(const Matrix& transition, const Matrix& joint, Matrix& out, double negligible = 0.0);

/// Both outcome branches of one round in a single pass over `joint`.
/// Returns {mass of out0, mass of out1}.
std::pair<double, double> propagate_both(const TransitionKernel& kernel, const Matrix& joint, Matrix& out0,
                                         Matrix& out1, double negligible = 0.0);

[[nodiscard]] Vector marginal_n0(const BeliefMatrix& belief);
[[nodiscard]] Vector marginal_nk(const BeliefMatrix& belief);

/// Posterior mean of N_0.
[[nodiscard]] double mean_estimate(const BeliefMatrix& belief);
/// Posterior variance of N_0.
[[nodiscard]] double variance_estimate(const BeliefMatrix& belief);
/// argmax of the N_0 marginal; ties go to the smaller photon number.
[[nodiscard]] std::size_t mle_estimate(const BeliefMatrix& belief);

[[nodiscard]] double expected_loop_photons(const BeliefMatrix& belief);

}  // namespace looppnr
