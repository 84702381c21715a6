#include "looppnr/statistics.hpp"

#include <cmath>

namespace looppnr {

void RunningMoments::push(double x) noexcept {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

double RunningMoments::population_variance() const noexcept {
  return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0;
}

double RunningMoments::sample_variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMoments::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(sample_variance() / static_cast<double>(n_)) : 0.0;
}

double RunningMoments::variance_standard_error() const noexcept {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double var = m2_ / n;
  const double kurt_term = m4_ / n - var * var;
  return kurt_term > 0.0 ? std::sqrt(kurt_term / n) : 0.0;
}

}  // namespace looppnr
