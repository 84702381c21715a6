#include "looppnr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "looppnr/binomial.hpp"

namespace looppnr {

namespace {

// Subtracting two nearly equal probabilities may leave this much negative residue.
constexpr double kRoundingResidue = 1e-15;

void check_epsilon(double epsilon) { require_probability(epsilon, "epsilon"); }

// Sum over the number of photons routed to the detector during the round.
double rho_by_outcoupled_sum(std::size_t n_k, std::size_t n_prev, const SystemParams& params, double epsilon) {
  double total = 0.0;
  for (std::size_t m = 0; m + n_k <= n_prev; ++m) {
    const double no_click = (1.0 - params.nu) * std::pow(1.0 - params.gamma, static_cast<double>(m));
    total += no_click * binomial_pmf(n_k + m, n_prev, params.eta) * binomial_pmf(m, n_k + m, epsilon);
  }
  return total;
}

}  // namespace

double rho(std::size_t n_k, std::size_t n_prev, const SystemParams& params, double epsilon) {
  params.validate();
  check_epsilon(epsilon);
  if (n_k > n_prev) {
    throw InvalidArgument("rho: n_k = " + std::to_string(n_k) + " exceeds n_prev = " + std::to_string(n_prev));
  }
  if (n_prev > params.n_max) {
    throw InvalidArgument("rho: n_prev exceeds n_max");
  }

  const double not_detected = 1.0 - params.eta * epsilon * params.gamma;
  if (not_detected < kSingularTolerance) {
    return rho_by_outcoupled_sum(n_k, n_prev, params, epsilon);
  }
  const double stay = std::clamp(params.eta * (1.0 - epsilon) / not_detected, 0.0, 1.0);
  return (1.0 - params.nu) * std::pow(not_detected, static_cast<double>(n_prev)) * binomial_pmf(n_k, n_prev, stay);
}

TransitionKernel transition_kernel(const SystemParams& params, double epsilon) {
  params.validate();
  check_epsilon(epsilon);

  const auto dim = static_cast<Eigen::Index>(params.dimension());
  TransitionKernel kernel{epsilon, Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};

  const double survive = params.eta * (1.0 - epsilon);
  const double not_detected = 1.0 - params.eta * epsilon * params.gamma;
  const bool singular = not_detected < kSingularTolerance;
  const double stay = singular ? 0.0 : std::clamp(survive / not_detected, 0.0, 1.0);

  for (Eigen::Index n = 0; n < dim; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const double undetected = singular ? 0.0 : std::pow(not_detected, static_cast<double>(n));
    for (Eigen::Index m = 0; m <= n; ++m) {
      const auto um = static_cast<std::size_t>(m);
      double quiet = 0.0;
      double click = 0.0;
      if (singular) {
        quiet = rho_by_outcoupled_sum(um, un, params, epsilon);
        click = binomial_pmf(um, un, survive) - quiet;
      } else {
        // Split off the dark count so the no-photon column carries nu exactly.
        const double no_photon_hit = undetected * binomial_pmf(um, un, stay);
        quiet = (1.0 - params.nu) * no_photon_hit;
        click = (binomial_pmf(um, un, survive) - no_photon_hit) + params.nu * no_photon_hit;
      }
      if (click < 0.0) {
        if (click < -kRoundingResidue) {
          throw std::logic_error("transition_kernel: negative click probability " + std::to_string(click));
        }
        click = 0.0;
      }
      kernel.r0(m, n) = quiet;
      kernel.r1(m, n) = click;
    }
  }
  return kernel;
}

TransitionKernel enumerate_kernel(const SystemParams& params, double epsilon, std::size_t n_cap) {
  params.validate();
  check_epsilon(epsilon);
  if (n_cap > kEnumerationLimit) {
    throw InvalidArgument("enumerate_kernel: n_cap " + std::to_string(n_cap) + " exceeds enumeration limit " +
                          std::to_string(kEnumerationLimit));
  }

  const auto dim = static_cast<Eigen::Index>(n_cap + 1);
  TransitionKernel kernel{epsilon, Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};

  for (std::size_t n = 0; n <= n_cap; ++n) {
    for (std::size_t kept = 0; kept <= n; ++kept) {
      for (std::size_t out = 0; kept + out <= n; ++out) {
        // kept + out photons survive the loop, of which `out` are routed to the detector
        const double fate = binomial_pmf(kept + out, n, params.eta) * binomial_pmf(out, kept + out, epsilon);
        const double silent = (1.0 - params.nu) * std::pow(1.0 - params.gamma, static_cast<double>(out));
        const auto row = static_cast<Eigen::Index>(kept);
        const auto col = static_cast<Eigen::Index>(n);
        kernel.r0(row, col) += silent * fate;
        kernel.r1(row, col) += (1.0 - silent) * fate;
      }
    }
  }
  return kernel;
}

KernelCache::KernelCache(SystemParams params) : params_(params) { params_.validate(); }

std::int64_t KernelCache::quantize(double epsilon) noexcept { return std::llround(epsilon * 1e12); }

std::shared_ptr<const TransitionKernel> KernelCache::get(double epsilon) {
  const auto key = quantize(epsilon);
  {
    std::lock_guard lock(mutex_);
    if (auto it = kernels_.find(key); it != kernels_.end()) {
      return it->second;
    }
  }
  // Build outside the lock; a racing builder produces an identical kernel.
  auto built = std::make_shared<const TransitionKernel>(transition_kernel(params_, epsilon));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = kernels_.emplace(key, std::move(built));
  return it->second;
}

std::size_t KernelCache::size() const {
  std::lock_guard lock(mutex_);
  return kernels_.size();
}

}  // namespace looppnr
