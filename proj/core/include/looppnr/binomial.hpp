#pragma once

#include <cstddef>

namespace looppnr {

/// Binomial probability mass C(n, k) p^k (1 - p)^(n - k), with 0^0 = 1.
///
/// Throws InvalidArgument when k > n or p is outside [0, 1].
[[nodiscard]] double binomial_pmf(std::size_t k, std::size_t n, double p);

/// Natural log of C(n, k); requires k <= n.
[[nodiscard]] double log_binomial_coefficient(std::size_t k, std::size_t n);

}  // namespace looppnr
