#include "martinet/fields.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "martinet/numerics.hpp"

namespace martinet {

std::array<double, 2> x_gradient(const ScalarField& f, const SpacePoint& p,
                                 const FrameParams& fp) {
  if (p.z < 0.0) throw std::domain_error("x_gradient: point below the half-space");
  const Gradient3 g = f.euclid_grad(p);
  return {g[0], g[1] + fp.abs_pow(p.x) * g[2]};
}

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

ScalarField gauss() {
  ScalarField f;
  f.name = "gauss";
  f.value = [](const SpacePoint& p) { return std::exp(-p.x * p.x - p.y * p.y - p.z); };
  f.euclid_grad = [](const SpacePoint& p) {
    const double v = std::exp(-p.x * p.x - p.y * p.y - p.z);
    return Gradient3{-2.0 * p.x * v, -2.0 * p.y * v, -v};
  };
  f.support = {1.0, 1.0, 5.0};
  return f;
}

ScalarField poly_bump() {
  ScalarField f;
  f.name = "poly_bump";
  f.value = [](const SpacePoint& p) {
    const double s = 1.0 - p.x * p.x - p.y * p.y - p.z;
    return s > 0.0 ? s * s * s : 0.0;
  };
  f.euclid_grad = [](const SpacePoint& p) {
    const double s = 1.0 - p.x * p.x - p.y * p.y - p.z;
    if (s <= 0.0) return Gradient3{0.0, 0.0, 0.0};
    const double d = -3.0 * s * s;
    return Gradient3{2.0 * p.x * d, 2.0 * p.y * d, d};
  };
  f.support = {1.0, 1.0, 1.0, true};
  return f;
}

// exp(-D^2) with D = delta(q, 0) = |x| + |y| + V(zeta), zeta = z - |x|^alpha y.
// The gradient is the piecewise chain rule; on the branch loci x = 0, y = 0,
// zeta = 0 the non-differentiable term contributes zero.
ScalarField delta_radial(const FrameParams& fp) {
  ScalarField f;
  f.name = "delta_radial";
  f.value = [fp](const SpacePoint& q) {
    const double d = delta(q, SpacePoint{}, fp).total;
    return std::exp(-d * d);
  };
  f.euclid_grad = [fp](const SpacePoint& q) {
    const double a = fp.alpha();
    const DeltaBreakdown b = delta(q, SpacePoint{}, fp);
    const double zeta = b.zeta;
    Gradient3 dD{sgn(q.x), sgn(q.y), 0.0};
    if (zeta != 0.0) {
      const double ax = std::fabs(q.x);
      const Gradient3 dzeta{-a * pow_abs(q.x, a - 1.0) * sgn(q.x) * q.y, -fp.abs_pow(q.x), 1.0};
      const double flat = vertical_norm_flat(zeta, fp);
      const bool use_flat = q.x == 0.0 || flat <= vertical_norm_tilted(zeta, q.x, fp);
      if (use_flat) {
        const double c = flat / ((a + 1.0) * zeta);
        for (int i = 0; i < 3; ++i) dD[i] += c * dzeta[i];
      } else {
        const double root = std::sqrt(std::fabs(zeta));
        const double den = pow_abs(ax, 0.5 * (a - 1.0));
        const double c = 0.5 * sgn(zeta) / (root * den);
        for (int i = 0; i < 3; ++i) dD[i] += c * dzeta[i];
        dD[0] += -0.5 * (a - 1.0) * root / (den * ax) * sgn(q.x);
      }
    }
    const double d = b.total;
    const double outer = -2.0 * d * std::exp(-d * d);
    return Gradient3{outer * dD[0], outer * dD[1], outer * dD[2]};
  };
  f.support = {2.0, 2.0, 4.0};
  return f;
}

}  // namespace

ScalarField builtin_field(const std::string& name, const FrameParams& fp) {
  if (name == "gauss") return gauss();
  if (name == "poly_bump") return poly_bump();
  if (name == "delta_radial") return delta_radial(fp);
  throw std::invalid_argument("unknown field: " + name);
}

ScalarField dilated(const ScalarField& f, double r, const FrameParams& fp) {
  if (!(r > 0.0)) throw std::invalid_argument("dilation factor must be > 0");
  const double rz = pow_abs(r, fp.alpha() + 1.0);
  ScalarField g;
  g.name = f.name;
  g.value = [f, r, fp](const SpacePoint& p) { return f.value(dilate(p, r, fp)); };
  g.euclid_grad = [f, r, rz, fp](const SpacePoint& p) {
    const Gradient3 d = f.euclid_grad(dilate(p, r, fp));
    return Gradient3{r * d[0], r * d[1], rz * d[2]};
  };
  g.support = {f.support.x / r, f.support.y / r, f.support.z / rz, f.support.compact};
  return g;
}

ScalarField translated_y(const ScalarField& f, double eta) {
  ScalarField g;
  g.name = f.name;
  g.value = [f, eta](const SpacePoint& p) { return f.value({p.x, p.y + eta, p.z}); };
  g.euclid_grad = [f, eta](const SpacePoint& p) { return f.euclid_grad({p.x, p.y + eta, p.z}); };
  g.support = f.support;
  g.support.compact = false;  // the support box no longer contains the shifted support
  return g;
}

ScalarField random_smooth_field(std::uint64_t seed) {
  struct Wave {
    double amp, kx, ky, kz, phase;
  };
  Rng rng(seed, 0x5EED);
  auto waves = std::make_shared<std::vector<Wave>>();
  const int n = 3 + static_cast<int>(rng.next() % 3);
  for (int i = 0; i < n; ++i) {
    waves->push_back({rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                      rng.uniform(-2.0, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi)});
  }
  const double width = rng.uniform(0.5, 2.0);
  ScalarField f;
  f.name = "random";
  f.value = [waves, width](const SpacePoint& p) {
    double s = 0.0;
    for (const auto& w : *waves) s += w.amp * std::sin(w.kx * p.x + w.ky * p.y + w.kz * p.z + w.phase);
    return s * std::exp(-(p.x * p.x + p.y * p.y + p.z * p.z) / (width * width));
  };
  f.euclid_grad = [waves, width](const SpacePoint& p) {
    double s = 0.0;
    Gradient3 ds{0.0, 0.0, 0.0};
    for (const auto& w : *waves) {
      const double arg = w.kx * p.x + w.ky * p.y + w.kz * p.z + w.phase;
      s += w.amp * std::sin(arg);
      const double c = w.amp * std::cos(arg);
      ds[0] += c * w.kx;
      ds[1] += c * w.ky;
      ds[2] += c * w.kz;
    }
    const double w2 = width * width;
    const double env = std::exp(-(p.x * p.x + p.y * p.y + p.z * p.z) / w2);
    return Gradient3{env * (ds[0] - 2.0 * p.x / w2 * s), env * (ds[1] - 2.0 * p.y / w2 * s),
                     env * (ds[2] - 2.0 * p.z / w2 * s)};
  };
  f.support = {width, width, width};
  return f;
}

}  // namespace martinet
