#pragma once

#include <cstddef>

namespace looppnr {

// Idealized loop detector: photon j of n0 reaches its own detector bin with
// efficiency gamma * eta^j, so the click count is a sum of independent
// Bernoulli trials. These bound what any outcoupling schedule can achieve.

/// Mean click count gamma (1 - eta^n0) / (1 - eta); gamma n0 at eta = 1.
[[nodiscard]] double optimal_mean_clicks(std::size_t n0, double eta, double gamma);

/// Variance of the click count.
[[nodiscard]] double optimal_click_variance(std::size_t n0, double eta, double gamma);

/// Variance of the unbiased estimator obtained by rescaling the click count,
/// n0^2 (1 - eta) / (1 - eta^n0) (1/gamma - (1 + eta^n0) / (1 + eta)). Requires n0 >= 1.
[[nodiscard]] double optimal_estimator_variance(std::size_t n0, double eta, double gamma);

/// Small-loss regime n0 (1 - eta) << 1: n0 (1/gamma - 1).
[[nodiscard]] double optimal_estimator_variance_small_loss(std::size_t n0, double gamma);

/// Large-loss regime n0 (1 - eta) >> 1: n0^2 (1 - eta) (1/gamma - 1/(1 + eta)).
[[nodiscard]] double optimal_estimator_variance_large_loss(std::size_t n0, double eta, double gamma);

}  // namespace looppnr
