#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "looppnr/kernel.hpp"

namespace looppnr {

struct UniformPrior {
  friend bool operator==(const UniformPrior&, const UniformPrior&) = default;
};
struct PoissonPrior {
  double mean = 1.0;
  friend bool operator==(const PoissonPrior&, const PoissonPrior&) = default;
};
/// Mass `p1` on n1 and 1 - p1 on n2.
struct TwoPointPrior {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double p1 = 0.5;
  friend bool operator==(const TwoPointPrior&, const TwoPointPrior&) = default;
};
struct CustomPrior {
  std::vector<double> weights;
  friend bool operator==(const CustomPrior&, const CustomPrior&) = default;
};

using PriorKind = std::variant<UniformPrior, PoissonPrior, TwoPointPrior, CustomPrior>;

/// Prior P(N_0 = n) over 0..n_max.
class PriorDistribution {
 public:
  /// Evaluates `kind` on 0..n_max. Poisson mass beyond n_max is dropped and the
  /// remainder renormalized; custom weights must have n_max + 1 entries and are
  /// normalized if their sum is positive.
  PriorDistribution(PriorKind kind, std::size_t n_max);

  static PriorDistribution uniform(std::size_t n_max) { return {UniformPrior{}, n_max}; }

  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] const PriorKind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t n_max() const noexcept { return static_cast<std::size_t>(weights_.size()) - 1; }
  [[nodiscard]] double operator[](std::size_t n) const { return weights_(static_cast<Eigen::Index>(n)); }
  [[nodiscard]] std::string label() const;

 private:
  PriorKind kind_;
  Vector weights_;
};

}  // namespace looppnr
