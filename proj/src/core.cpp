#include "martinet/core.hpp"

#include <algorithm>
#include <string>

namespace martinet {

namespace {

constexpr int kMaxFastExponent = 64;

double ipow(double base, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

int integer_exponent(double e) {
  if (e >= 0.0 && e <= kMaxFastExponent && std::floor(e) == e) return static_cast<int>(e);
  return -1;
}

}  // namespace

FrameParams::FrameParams(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < 1.0) {
    throw std::invalid_argument("alpha must be finite and >= 1, got " + std::to_string(alpha));
  }
  integer_exponent_ = integer_exponent(alpha);
}

double FrameParams::abs_pow(double t) const {
  const double a = std::fabs(t);
  if (integer_exponent_ >= 0) return ipow(a, integer_exponent_);
  if (a == 0.0) return 0.0;
  return std::pow(a, alpha_);
}

double FrameParams::antiderivative(double t) const {
  const double a = std::fabs(t);
  const double mag = integer_exponent_ >= 0 ? ipow(a, integer_exponent_ + 1)
                                            : (a == 0.0 ? 0.0 : std::pow(a, alpha_ + 1.0));
  return std::copysign(mag, t) / (alpha_ + 1.0);
}

double FrameParams::integral_step(double x, double h) const {
  const double end = x + h;
  if (x == 0.0 || end == 0.0 || (x < 0.0) != (end < 0.0)) {
    return antiderivative(end) - antiderivative(x);
  }
  // Same side of the axis: (|end|^beta - |x|^beta) / beta, signed.
  const double lo = std::fabs(x);
  const double grow = x > 0.0 ? h : -h;  // |end| - |x|
  const double beta = alpha_ + 1.0;
  double diff;
  if (std::fabs(grow) > lo) {
    diff = pow_abs(end, beta) - pow_abs(lo, beta);
  } else {
    diff = pow_abs(lo, beta) * std::expm1(beta * std::log1p(grow / lo));
  }
  return (x > 0.0 ? diff : -diff) / beta;
}

BesovParams::BesovParams(double p_exponent) : p(p_exponent), s(1.0 - 1.0 / p_exponent) {
  if (!std::isfinite(p_exponent) || p_exponent <= 1.0) {
    throw std::invalid_argument("Besov exponent p must be > 1");
  }
}

double pow_abs(double t, double e) {
  const double a = std::fabs(t);
  const int n = integer_exponent(e);
  if (n >= 0) return ipow(a, n);
  if (a == 0.0) return 0.0;
  return std::pow(a, e);
}

double relative_error(const SpacePoint& a, const SpacePoint& b) {
  const double diff =
      std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)});
  const double scale = std::max({std::fabs(b.x), std::fabs(b.y), std::fabs(b.z)});
  return diff / (1.0 + scale);
}

double zeta(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp) {
  return p.z - q.z + fp.abs_pow(p.x) * (q.y - p.y);
}

double vertical_norm_flat(double zeta_value, const FrameParams& fp) {
  const double a = std::fabs(zeta_value);
  if (fp.alpha() == 1.0) return std::sqrt(a);
  if (fp.alpha() == 2.0) return std::cbrt(a);
  return a == 0.0 ? 0.0 : std::pow(a, 1.0 / (fp.alpha() + 1.0));
}

double vertical_norm_tilted(double zeta_value, double x, const FrameParams& fp) {
  const double num = std::sqrt(std::fabs(zeta_value));
  if (fp.alpha() == 1.0) return num;
  const double den = fp.alpha() == 3.0 ? std::fabs(x) : pow_abs(x, 0.5 * (fp.alpha() - 1.0));
  return num / den;
}

double vertical_term(double zeta_value, double x, const FrameParams& fp) {
  if (zeta_value == 0.0) return 0.0;
  if (x == 0.0) return vertical_norm_flat(zeta_value, fp);
  return std::min(vertical_norm_flat(zeta_value, fp), vertical_norm_tilted(zeta_value, x, fp));
}

DeltaBreakdown delta(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp) {
  DeltaBreakdown b;
  b.dx = std::fabs(q.x - p.x);
  b.dy = std::fabs(q.y - p.y);
  b.zeta = zeta(p, q, fp);
  b.vertical = vertical_term(b.zeta, p.x, fp);
  b.total = b.dx + b.dy + b.vertical;
  return b;
}

double delta_plane(const SurfacePoint& u, const SurfacePoint& v, const FrameParams&) {
  const double dy = std::fabs(v.y - u.y);
  return std::fabs(v.x - u.x) + dy + std::sqrt(std::fabs(u.x)) * std::sqrt(dy);
}

SpacePoint dilate(const SpacePoint& p, double r, const FrameParams& fp) {
  if (!(r >= 0.0)) throw std::invalid_argument("dilation factor must be >= 0");
  return {r * p.x, r * p.y, pow_abs(r, fp.alpha() + 1.0) * p.z};
}

SpacePoint apply_symmetry(const SpacePoint& p, const SymmetrySpec& spec) {
  return {spec.reflect_x ? -p.x : p.x, p.y + spec.translate_y, p.z + spec.translate_z};
}

}  // namespace martinet
