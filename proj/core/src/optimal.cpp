#include "looppnr/optimal.hpp"

#include <cmath>

#include "looppnr/params.hpp"

namespace looppnr {

namespace {

void check(double eta, double gamma) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("optimal baseline: eta must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("optimal baseline: gamma must lie in (0, 1]");
}

// (1 - eta^k) / (1 - eta) without cancellation near eta = 1; k at eta = 1.
double geometric_sum(double k, double eta) {
  if (eta == 1.0) return k;
  return std::expm1(k * std::log(eta)) / std::expm1(std::log(eta));
}

}  // namespace

double optimal_mean_clicks(std::size_t n0, double eta, double gamma) {
  check(eta, gamma);
  return gamma * geometric_sum(static_cast<double>(n0), eta);
}

double optimal_click_variance(std::size_t n0, double eta, double gamma) {
  check(eta, gamma);
  const auto n = static_cast<double>(n0);
  return gamma * geometric_sum(n, eta) - gamma * gamma * geometric_sum(n, eta * eta);
}

double optimal_estimator_variance(std::size_t n0, double eta, double gamma) {
  check(eta, gamma);
  if (n0 == 0) throw InvalidArgument("optimal_estimator_variance: n0 must be >= 1");
  const auto n = static_cast<double>(n0);
  const double eta_n = std::pow(eta, n);
  return n * n / geometric_sum(n, eta) * (1.0 / gamma - (1.0 + eta_n) / (1.0 + eta));
}

double optimal_estimator_variance_small_loss(std::size_t n0, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("optimal baseline: gamma must lie in (0, 1]");
  return static_cast<double>(n0) * (1.0 / gamma - 1.0);
}

double optimal_estimator_variance_large_loss(std::size_t n0, double eta, double gamma) {
  check(eta, gamma);
  const auto n = static_cast<double>(n0);
  return n * n * (1.0 - eta) * (1.0 / gamma - 1.0 / (1.0 + eta));
}

}  // namespace looppnr
