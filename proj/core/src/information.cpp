#include "looppnr/information.hpp"

#include <cmath>
#include <string>

namespace looppnr {

double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("kl_divergence: length mismatch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) {
      throw SupportMismatch("kl_divergence: p has mass at index " + std::to_string(i) + " where q is zero");
    }
    total += p(i) * std::log2(p(i) / q(i));
  }
  // Rounding can push a numerically-zero divergence slightly negative.
  return total < 0.0 ? 0.0 : total;
}

double shannon_entropy(const Vector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log2(p(i));
  }
  return h;
}

double info_gained(const BeliefMatrix& belief) { return kl_divergence(marginal_n0(belief), belief.prior().weights()); }

double info_available(const BeliefMatrix& belief) {
  return information_of(belief.joint(), 1.0, belief.prior().weights()).available;
}

InformationPair information_of(const Matrix& joint, double mass, const Vector& prior, double negligible) {
  const Eigen::Index dim = joint.rows();
  const double inv_mass = 1.0 / mass;
  const Vector rows = joint.rowwise().sum();
  const Vector cols = joint.colwise().sum().transpose();

  InformationPair info;
  double prior_term = 0.0;
  for (Eigen::Index n = 0; n < dim; ++n) {
    const double c = cols(n);
    if (c <= 0.0) continue;
    if (prior(n) <= 0.0) {
      throw SupportMismatch("belief has mass at N_0 = " + std::to_string(n) + " outside the prior's support");
    }
    const double log_prior = std::log2(prior(n));
    const double p = c * inv_mass;
    info.gained += p * (std::log2(p) - log_prior);
    prior_term += p * log_prior;
  }

  double conditional = 0.0;
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m <= n; ++m) {
      const double x = joint(m, n);
      if (x <= negligible) continue;
      // Divide rather than multiply by 1/rows: a subnormal row sum has no finite inverse.
      conditional += x * std::log2(x / rows(m));
    }
  }
  info.available = conditional * inv_mass - prior_term;
  return info;
}

}  // namespace looppnr
