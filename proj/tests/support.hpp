#pragma once

#include <cmath>

#include "martinet/core.hpp"
#include "martinet/numerics.hpp"

namespace martinet::testing {

/// Log-uniform magnitude in [10^lo, 10^hi] with a random sign.
inline double signed_log(Rng& rng, double lo = -2.0, double hi = 2.0) {
  const double m = std::pow(10.0, rng.uniform(lo, hi));
  return rng.coin() ? m : -m;
}

inline SpacePoint random_point(Rng& rng) {
  return {signed_log(rng), signed_log(rng), signed_log(rng)};
}

inline double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

}  // namespace martinet::testing
