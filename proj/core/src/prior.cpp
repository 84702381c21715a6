#include "looppnr/prior.hpp"

#include <cmath>
#include <sstream>

namespace looppnr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector evaluate(const PriorKind& kind, std::size_t n_max) {
  const auto dim = static_cast<Eigen::Index>(n_max + 1);
  Vector w = Vector::Zero(dim);

  std::visit(Overloaded{
                 [&](const UniformPrior&) { w.setConstant(1.0 / static_cast<double>(dim)); },
                 [&](const PoissonPrior& p) {
                   if (!(p.mean > 0.0) || !std::isfinite(p.mean)) {
                     throw InvalidArgument("poisson prior: mean must be positive");
                   }
                   for (Eigen::Index n = 0; n < dim; ++n) {
                     const auto fn = static_cast<double>(n);
                     w(n) = std::exp(fn * std::log(p.mean) - p.mean - std::lgamma(fn + 1.0));
                   }
                 },
                 [&](const TwoPointPrior& p) {
                   require_probability(p.p1, "two_point prior: p1");
                   if (p.n1 > n_max || p.n2 > n_max) {
                     throw InvalidArgument("two_point prior: support point exceeds n_max");
                   }
                   w(static_cast<Eigen::Index>(p.n1)) += p.p1;
                   w(static_cast<Eigen::Index>(p.n2)) += 1.0 - p.p1;
                 },
                 [&](const CustomPrior& p) {
                   if (p.weights.size() != n_max + 1) {
                     throw InvalidArgument("custom prior: expected " + std::to_string(n_max + 1) + " weights, got " +
                                           std::to_string(p.weights.size()));
                   }
                   for (Eigen::Index n = 0; n < dim; ++n) {
                     const double v = p.weights[static_cast<std::size_t>(n)];
                     if (!(v >= 0.0) || !std::isfinite(v)) {
                       throw InvalidArgument("custom prior: weights must be finite and nonnegative");
                     }
                     w(n) = v;
                   }
                 },
             },
             kind);

  const double total = w.sum();
  if (!(total > 0.0)) {
    throw InvalidArgument("prior has no mass on 0..n_max");
  }
  return w / total;
}

}  // namespace

PriorDistribution::PriorDistribution(PriorKind kind, std::size_t n_max)
    : kind_(std::move(kind)), weights_(evaluate(kind_, n_max)) {
  if (n_max < 1) {
    throw InvalidArgument("prior: n_max must be >= 1");
  }
}

std::string PriorDistribution::label() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const UniformPrior&) { out << "uniform"; },
                 [&](const PoissonPrior& p) { out << "poisson(" << p.mean << ")"; },
                 [&](const TwoPointPrior& p) { out << "two_point(" << p.n1 << "," << p.n2 << "," << p.p1 << ")"; },
                 [&](const CustomPrior&) { out << "custom"; },
             },
             kind_);
  return out.str();
}

}  // namespace looppnr
