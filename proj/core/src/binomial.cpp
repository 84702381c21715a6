#include "looppnr/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "looppnr/params.hpp"

namespace looppnr {

namespace {

// C(1020, 510) is still below DBL_MAX; above this the coefficient goes through lgamma.
constexpr std::size_t kDirectCoefficientLimit = 1000;
constexpr double kUnderflowGuard = 1e-290;

double binomial_coefficient(std::size_t k, std::size_t n) {
  const std::size_t j = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= j; ++i) {
    c = c * static_cast<double>(n - j + i) / static_cast<double>(i);
  }
  return c;
}

}  // namespace

double log_binomial_coefficient(std::size_t k, std::size_t n) {
  if (k > n) {
    throw InvalidArgument("log_binomial_coefficient: k > n");
  }
  if (n <= kDirectCoefficientLimit) {
    return std::log(binomial_coefficient(k, n));
  }
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial_pmf(std::size_t k, std::size_t n, double p) {
  if (k > n) {
    throw InvalidArgument("binomial_pmf: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  require_probability(p, "binomial_pmf: p");

  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;

  const auto fk = static_cast<double>(k);
  const auto fr = static_cast<double>(n - k);
  if (n <= kDirectCoefficientLimit) {
    const double success = std::pow(p, fk);
    const double failure = std::pow(1.0 - p, fr);
    // Near-underflowing factors lose their significand; the log route keeps it.
    if (success > kUnderflowGuard && failure > kUnderflowGuard) {
      return binomial_coefficient(k, n) * success * failure;
    }
  }
  return std::exp(log_binomial_coefficient(k, n) + fk * std::log(p) + fr * std::log1p(-p));
}

}  // namespace looppnr
