#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "looppnr/params.hpp"

namespace looppnr {

/// Dense column-major matrix used for kernels and beliefs.
using Matrix = Eigen::MatrixXd;
/// Dense vector used for marginals and priors.
using Vector = Eigen::VectorXd;

/// Below this, 1 - eta*eps*gamma is treated as zero and rho falls back to the
/// explicit sum over outcoupled photons.
inline constexpr double kSingularTolerance = 1e-12;

/// Largest photon cap enumerate_kernel accepts.
inline constexpr std::size_t kEnumerationLimit = 12;

/// One-round transition matrices for a fixed outcoupling rate.
///
/// `r0(m, n)` is the probability of ending the round with m photons in the
/// loop and no click, starting from n; `r1(m, n)` the same with a click. Both
/// are upper triangular (m <= n) and every column of r0 + r1 sums to one.
struct TransitionKernel {
  double epsilon = 0.0;
  Matrix r0;
  Matrix r1;

  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(r0.rows()); }
  [[nodiscard]] const Matrix& outcome(int click) const noexcept { return click != 0 ? r1 : r0; }
};

/// Probability of keeping `n_k` of `n_prev` photons while recording no click.
[[nodiscard]] double rho(std::size_t n_k, std::size_t n_prev, const SystemParams& params, double epsilon);

/// Closed-form kernel for `epsilon`.
[[nodiscard]] TransitionKernel transition_kernel(const SystemParams& params, double epsilon);

/// Kernel built by summing over every possible number of outcoupled photons.
///
/// Independent of the closed form and therefore usable as a reference; the
/// returned matrices have dimension n_cap + 1 and n_cap must not exceed
/// kEnumerationLimit.
[[nodiscard]] TransitionKernel enumerate_kernel(const SystemParams& params, double epsilon, std::size_t n_cap);

/// Thread-safe memo of kernels for one SystemParams, keyed by quantized epsilon.
class KernelCache {
 public:
  explicit KernelCache(SystemParams params);

  [[nodiscard]] std::shared_ptr<const TransitionKernel> get(double epsilon);
  [[nodiscard]] const SystemParams& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t size() const;

  /// Cache key: epsilon rounded to a 1e-12 grid.
  [[nodiscard]] static std::int64_t quantize(double epsilon) noexcept;

 private:
  SystemParams params_;
  mutable std::mutex mutex_;
  std::map<std::int64_t, std::shared_ptr<const TransitionKernel>> kernels_;
};

}  // namespace looppnr
