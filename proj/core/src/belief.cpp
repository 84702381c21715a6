#include "looppnr/belief.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace looppnr {

namespace {

void check_dimension(const BeliefMatrix& belief, const TransitionKernel& kernel) {
  if (kernel.dimension() != belief.dimension()) {
    throw InvalidArgument("kernel dimension " + std::to_string(kernel.dimension()) +
                          " does not match belief dimension " + std::to_string(belief.dimension()));
  }
}

}  // namespace

BeliefMatrix::BeliefMatrix(std::shared_ptr<const PriorDistribution> prior) : prior_(std::move(prior)) {
  if (!prior_) {
    throw InvalidArgument("belief requires a prior");
  }
  joint_ = prior_->weights().asDiagonal();
}

BeliefMatrix::BeliefMatrix(Matrix joint, std::shared_ptr<const PriorDistribution> prior, std::size_t round)
    : joint_(std::move(joint)), round_(round), prior_(std::move(prior)) {}

BeliefMatrix BeliefMatrix::from_joint(Matrix joint, std::shared_ptr<const PriorDistribution> prior,
                                      std::size_t round_index) {
  if (!prior) {
    throw InvalidArgument("belief requires a prior");
  }
  const auto dim = static_cast<Eigen::Index>(prior->n_max() + 1);
  if (joint.rows() != dim || joint.cols() != dim) {
    throw InvalidArgument("joint must be square with the prior's dimension");
  }
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      const double v = joint(m, n);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("joint entries must be finite and nonnegative");
      }
      if (m > n && v != 0.0) {
        throw InvalidArgument("joint must vanish below the diagonal (N_k <= N_0)");
      }
    }
  }
  const double total = joint.sum();
  if (!(total > kMassFloor)) {
    throw InvalidArgument("joint has no mass");
  }
  joint /= total;
  return BeliefMatrix(std::move(joint), std::move(prior), round_index);
}

void BeliefMatrix::apply(const TransitionKernel& kernel, int click) {
  check_dimension(*this, kernel);
  const double mass = propagate(kernel.outcome(click), joint_, scratch_);
  if (!(mass >= kMassFloor)) {
    throw AllMassLost("observed click " + std::to_string(click) + " at round " + std::to_string(round_ + 1) +
                      " has probability " + std::to_string(mass) + " under the model");
  }
  scratch_ /= mass;
  joint_.swap(scratch_);
  ++round_;
}

BeliefMatrix init_belief(const PriorDistribution& prior) {
  return BeliefMatrix(std::make_shared<const PriorDistribution>(prior));
}

BeliefMatrix update(const BeliefMatrix& belief, const TransitionKernel& kernel, int click) {
  BeliefMatrix next = belief;
  next.apply(kernel, click);
  return next;
}

namespace {

// Columns per triangular-product block; the product is upper triangular so
// block c only touches rows [0, end of block).
constexpr Eigen::Index kBlockWidth = 32;

// Rows and columns of `joint` that carry mass above `negligible`.
struct ActiveRange {
  Eigen::Index rows = 0;       // rows [0, rows) are active
  Eigen::Index first_col = 0;  // columns [first_col, end_col) are active
  Eigen::Index end_col = 0;
};

ActiveRange active_range(const Matrix& joint, double negligible) {
  const Eigen::Index dim = joint.rows();
  ActiveRange r{0, dim, 0};
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index k = n; k >= 0; --k) {
      if (joint(k, n) > negligible) {
        r.rows = std::max(r.rows, k + 1);
        r.first_col = std::min(r.first_col, n);
        r.end_col = n + 1;
        break;
      }
    }
  }
  if (r.end_col == 0) r.first_col = 0;
  return r;
}

template <class Apply>
void for_each_block(const ActiveRange& range, Apply&& apply) {
  for (Eigen::Index c0 = range.first_col; c0 < range.end_col; c0 += kBlockWidth) {
    const Eigen::Index width = std::min(kBlockWidth, range.end_col - c0);
    const Eigen::Index rows = std::min(c0 + width, range.rows);
    if (rows > 0) apply(c0, width, rows);
  }
}

}  // namespace

double propagate(const Matrix& transition, const Matrix& joint, Matrix& out, double negligible) {
  const Eigen::Index dim = joint.rows();
  out.setZero(dim, dim);
  for_each_block(active_range(joint, negligible), [&](Eigen::Index c0, Eigen::Index width, Eigen::Index rows) {
    out.block(0, c0, rows, width).noalias() =
        transition.topLeftCorner(rows, rows).triangularView<Eigen::Upper>() * joint.block(0, c0, rows, width);
  });
  return out.sum();
}

std::pair<double, double> propagate_both(const TransitionKernel& kernel, const Matrix& joint, Matrix& out0,
                                         Matrix& out1, double negligible) {
  const Eigen::Index dim = joint.rows();
  out0.setZero(dim, dim);
  out1.setZero(dim, dim);
  for_each_block(active_range(joint, negligible), [&](Eigen::Index c0, Eigen::Index width, Eigen::Index rows) {
    const auto rhs = joint.block(0, c0, rows, width);
    out0.block(0, c0, rows, width).noalias() =
        kernel.r0.topLeftCorner(rows, rows).triangularView<Eigen::Upper>() * rhs;
    out1.block(0, c0, rows, width).noalias() =
        kernel.r1.topLeftCorner(rows, rows).triangularView<Eigen::Upper>() * rhs;
  });
  return {out0.sum(), out1.sum()};
}

Vector marginal_n0(const BeliefMatrix& belief) { return belief.joint().colwise().sum().transpose(); }

Vector marginal_nk(const BeliefMatrix& belief) { return belief.joint().rowwise().sum(); }

double mean_estimate(const BeliefMatrix& belief) {
  const Vector p = marginal_n0(belief);
  return Vector::LinSpaced(p.size(), 0.0, static_cast<double>(p.size() - 1)).dot(p);
}

double variance_estimate(const BeliefMatrix& belief) {
  const Vector p = marginal_n0(belief);
  const double mean = Vector::LinSpaced(p.size(), 0.0, static_cast<double>(p.size() - 1)).dot(p);
  double var = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    const double dev = static_cast<double>(n) - mean;
    var += dev * dev * p(n);
  }
  return var;
}

std::size_t mle_estimate(const BeliefMatrix& belief) {
  const Vector p = marginal_n0(belief);
  Eigen::Index best = 0;
  for (Eigen::Index n = 1; n < p.size(); ++n) {
    if (p(n) > p(best)) best = n;
  }
  return static_cast<std::size_t>(best);
}

double expected_loop_photons(const BeliefMatrix& belief) {
  const Vector p = marginal_nk(belief);
  return Vector::LinSpaced(p.size(), 0.0, static_cast<double>(p.size() - 1)).dot(p);
}

}  // namespace looppnr
