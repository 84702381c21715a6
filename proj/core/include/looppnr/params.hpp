#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace looppnr {

/// Raised when a caller hands the library parameters outside their domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical constants of one loop-detector configuration.
///
/// `eta` is the per-round probability that a stored photon survives the loop,
/// `gamma` the detector quantum efficiency, `nu` the per-round dark-click
/// probability. `n_max` caps the photon numbers the inference tracks; every
/// matrix in the library is (n_max + 1) x (n_max + 1).
struct SystemParams {
  double eta = 0.99;
  double gamma = 0.9;
  double nu = 1e-6;
  std::size_t n_max = 100;

  [[nodiscard]] std::size_t dimension() const noexcept { return n_max + 1; }

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Throws InvalidArgument unless 0 <= p <= 1. `what` names the quantity.
void require_probability(double p, const std::string& what);

}  // namespace looppnr
