#include "looppnr/params.hpp"

#include <cmath>

namespace looppnr {

void require_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(what + " must lie in [0, 1], got " + std::to_string(p));
  }
}

void SystemParams::validate() const {
  require_probability(eta, "eta");
  require_probability(gamma, "gamma");
  require_probability(nu, "nu");
  if (nu >= 1.0) {
    throw InvalidArgument("nu must be < 1 (a detector that always clicks carries no information)");
  }
  if (n_max < 1) {
    throw InvalidArgument("n_max must be >= 1");
  }
}

}  // namespace looppnr
