#pragma once

#include <stdexcept>

#include "looppnr/belief.hpp"

namespace looppnr {

/// p has mass where the reference distribution q has none.
class SupportMismatch : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// D_KL(p || q) in bits, with 0 log 0 = 0.
[[nodiscard]] double kl_divergence(const Vector& p, const Vector& q);

/// Shannon entropy in bits.
[[nodiscard]] double shannon_entropy(const Vector& p);

/// Information gained so far: KL of the N_0 posterior from the prior.
[[nodiscard]] double info_gained(const BeliefMatrix& belief);

/// Information still available: the joint's KL from marginal_nk x prior,
/// i.e. the expected KL of P(N_0 | N_k, clicks) from the prior.
[[nodiscard]] double info_available(const BeliefMatrix& belief);

/// Both measures of joint / mass, evaluated in one sweep.
struct InformationPair {
  double gained = 0.0;
  double available = 0.0;
};

/// Evaluates the two measures on an unnormalized joint with total `mass`.
/// Entries at or below `negligible` are dropped from the available-information
/// sum; with the default every nonzero entry counts.
[[nodiscard]] InformationPair information_of(const Matrix& joint, double mass, const Vector& prior,
                                             double negligible = 0.0);

}  // namespace looppnr
