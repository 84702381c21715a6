#pragma once

#include <cstddef>

namespace looppnr {

/// Single-pass accumulator for the first four central moments.
///
/// Uses the Welford/Terriberry update so long runs of similar values do not
/// lose precision to cancellation.
class RunningMoments {
 public:
  void push(double x) noexcept;

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  /// Divides by n.
  [[nodiscard]] double population_variance() const noexcept;
  /// Divides by n - 1; zero for fewer than two samples.
  [[nodiscard]] double sample_variance() const noexcept;
  /// Standard error of the mean.
  [[nodiscard]] double standard_error() const noexcept;
  /// Large-sample standard error of population_variance(), from the fourth moment.
  [[nodiscard]] double variance_standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// A Monte Carlo statistic with its standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

}  // namespace looppnr
