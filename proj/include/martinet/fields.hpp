#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "martinet/core.hpp"

namespace martinet {

using Gradient3 = std::array<double, 3>;

/// Extent of the region where a field is non-negligible, per coordinate.
struct SupportHint {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;
  bool compact = false;  // f vanishes outside [-x,x] x [-y,y] x [0,z]
};

/// Analytic test function on the closed upper half-space. The caller
/// guarantees C^1 regularity on z >= 0.
struct ScalarField {
  std::string name;
  std::function<double(const SpacePoint&)> value;
  std::function<Gradient3(const SpacePoint&)> euclid_grad;
  SupportHint support;
};

/// (f_x, f_y + |x|^alpha f_z). Throws for p.z < 0.
std::array<double, 2> x_gradient(const ScalarField& f, const SpacePoint& p, const FrameParams& fp);

/// gauss: exp(-x^2 - y^2 - z); poly_bump: (1 - x^2 - y^2 - z)_+^3;
/// delta_radial: exp(-delta(q, 0)^2).
ScalarField builtin_field(const std::string& name, const FrameParams& fp);

/// g = f o dilate_r, with the support hint scaled accordingly.
ScalarField dilated(const ScalarField& f, double r, const FrameParams& fp);

/// g(x, y, z) = f(x, y + eta, z).
ScalarField translated_y(const ScalarField& f, double eta);

/// Random smooth field: a sum of plane waves under a Gaussian envelope.
ScalarField random_smooth_field(std::uint64_t seed);

}  // namespace martinet
