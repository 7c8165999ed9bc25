#pragma once

// Frame parameters, points and the quasi-distance for the vector fields
//   X1 = d/dx,  X2 = d/dy + |x|^alpha d/dz,  alpha >= 1.

#include <cmath>
#include <stdexcept>

namespace martinet {

class FrameParams {
 public:
  explicit FrameParams(double alpha);

  double alpha() const { return alpha_; }
  bool integer_alpha() const { return integer_exponent_ >= 0; }

  /// |t|^alpha, exact for integer alpha.
  double abs_pow(double t) const;
  /// |t|^(alpha+1) * sgn(t) / (alpha+1): the signed antiderivative of |t|^alpha.
  double antiderivative(double t) const;
  /// int_a^b |t|^alpha dt.
  double integral(double a, double b) const { return integral_step(a, b - a); }
  /// int_x^(x+h) |t|^alpha dt, accurate to rounding even when |h| << |x|.
  double integral_step(double x, double h) const;

 private:
  double alpha_;
  int integer_exponent_ = -1;
};

struct SpacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const SpacePoint&, const SpacePoint&) = default;
};

struct SurfacePoint {
  double x = 0.0;
  double y = 0.0;

  SpacePoint lifted() const { return {x, y, 0.0}; }
  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

struct DeltaBreakdown {
  double dx = 0.0;
  double dy = 0.0;
  double zeta = 0.0;
  double vertical = 0.0;
  double total = 0.0;
};

struct BesovParams {
  explicit BesovParams(double p_exponent);
  double p;
  double s;
};

/// |t|^e for a real exponent e >= 0 with an integer fast path.
double pow_abs(double t, double e);

/// Sup-norm relative distance |a-b|_inf / (1 + |b|_inf).
double relative_error(const SpacePoint& a, const SpacePoint& b);

double zeta(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp);

/// min{|zeta|^(1/(alpha+1)), |zeta|^(1/2) / |x|^((alpha-1)/2)}, with the
/// conventions: 0 when zeta = 0, the first branch when x = 0.
double vertical_term(double zeta_value, double x, const FrameParams& fp);

/// Components of the two anisotropic box norms, shared by delta and the
/// ball-box membership test so both agree bit for bit.
double vertical_norm_flat(double zeta_value, const FrameParams& fp);          // |zeta|^(1/(a+1))
double vertical_norm_tilted(double zeta_value, double x, const FrameParams& fp);  // |zeta|^(1/2)/|x|^((a-1)/2)

DeltaBreakdown delta(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp);

/// |x-x'| + |y-y'| + |x|^(1/2) |y'-y|^(1/2).
double delta_plane(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp);

/// (r x, r y, r^(alpha+1) z). Throws for r < 0.
SpacePoint dilate(const SpacePoint& p, double r, const FrameParams& fp);

struct SymmetrySpec {
  double translate_y = 0.0;
  double translate_z = 0.0;
  bool reflect_x = false;
};

SpacePoint apply_symmetry(const SpacePoint& p, const SymmetrySpec& spec);

}  // namespace martinet
