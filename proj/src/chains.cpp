#include "martinet/chains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace martinet {

const char* to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::Characteristic: return "characteristic";
    case CaseLabel::Noncharacteristic: return "noncharacteristic";
    case CaseLabel::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Generator g) {
  switch (g) {
    case Generator::PlusX1: return "+X1";
    case Generator::MinusX1: return "-X1";
    case Generator::PlusX2: return "+X2";
    case Generator::MinusX2: return "-X2";
    case Generator::PlusZ: return "+Z";
    case Generator::MinusZ: return "-Z";
  }
  return "?";
}

ChainConfig::ChainConfig(double eps0_value, double root_tol_value)
    : eps0(eps0_value), root_tol(root_tol_value) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("eps0 must lie in (0, 1)");
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be > 0");
}

ControlSegment ChainSegment::control() const {
  switch (generator) {
    case Generator::PlusX1: return {1.0, 0.0, duration};
    case Generator::MinusX1: return {-1.0, 0.0, duration};
    case Generator::PlusX2: return {0.0, 1.0, duration};
    case Generator::MinusX2: return {0.0, -1.0, duration};
    case Generator::PlusZ: return {1.0, 1.0, duration};
    case Generator::MinusZ: return {-1.0, -1.0, duration};
  }
  return {};
}

HorizontalPath ChainSpec::path() const {
  HorizontalPath p;
  const double s = reflected ? -1.0 : 1.0;
  p.start = points.empty() ? SpacePoint{} : SpacePoint{s * points.front().x, points.front().y,
                                                        points.front().z};
  for (const auto& seg : segments) {
    const ControlSegment c = seg.control();
    p.segments.emplace_back(s * c.e1(), c.e2(), c.duration());
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    p.samples.push_back({s * points[i].x, points[i].y, points[i].z});
  }
  return p;
}

SurfacePoint ChainSpec::from() const {
  const double s = reflected ? -1.0 : 1.0;
  return {s * points.front().x, points.front().y};
}

SurfacePoint ChainSpec::to() const {
  const double s = reflected ? -1.0 : 1.0;
  return {s * points.back().x, points.back().y};
}

CaseLabel classify(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                   const ChainConfig& cfg) {
  const double d = delta_plane(u, v, fp);
  const bool near_u = d >= cfg.eps0 * std::fabs(u.x);
  const bool near_v = d >= cfg.eps0 * std::fabs(v.x);
  if (near_u && near_v) return CaseLabel::Characteristic;
  if (!near_u && !near_v) return CaseLabel::Noncharacteristic;
  return CaseLabel::Mixed;
}

Normalization normalize(const SurfacePoint& u, const SurfacePoint& v, ChainKind kind) {
  Normalization out;
  SurfacePoint a = u;
  SurfacePoint b = v;
  if (b.y < a.y) {
    std::swap(a, b);
    out.log.push_back("swap: enforce y <= y'");
  }
  if (b.x < 0.0 || (b.x == 0.0 && a.x < 0.0)) {
    a.x = -a.x;
    b.x = -b.x;
    out.reflected = true;
    out.log.push_back("reflect: x -> -x");
  }
  auto add_third = [&](SurfacePoint w, const char* what) {
    out.has_third_point = true;
    out.third_point = w;
    out.pairs = {{a, w}, {b, w}};
    out.log.push_back(what);
  };
  if (kind == ChainKind::Characteristic) {
    if (std::fabs(a.x) <= b.x) {
      out.pairs = {{a, b}};
    } else if (a.x > b.x) {
      add_third({2.0 * a.x - b.x, 2.0 * b.y - a.y}, "third point (2x - x', 2y' - y)");
    } else {
      add_third({-a.x, 2.0 * b.y - a.y}, "third point (-x, 2y' - y)");
    }
  } else {
    if (a.x >= b.x) {
      out.pairs = {{a, b}};
    } else if (2.0 * a.x - b.x >= 0.0) {
      add_third({2.0 * a.x - b.x, 2.0 * b.y - a.y}, "third point (2x - x', 2y' - y)");
    } else {
      throw std::domain_error("pair cannot be normalized for the noncharacteristic chain");
    }
  }
  return out;
}

ChainSpec char_chain(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp) {
  const double x = u.x, y = u.y, xp = v.x, yp = v.y;
  if (!(y <= yp) || !(std::fabs(x) <= xp) || (xp == 0.0 && x != 0.0)) {
    throw std::domain_error("char_chain needs y <= y' and |x| <= x'");
  }
  const double ax = std::fabs(x);
  const double dy = yp - y;
  const double num = fp.abs_pow(2.0 * x) * dy;
  const double tau = num == 0.0 ? 0.0 : num / (fp.abs_pow(2.0 * xp) - fp.abs_pow(x));
  const double lifted = fp.abs_pow(x) * dy;
  const double top = fp.abs_pow(x) * (dy + tau / pow_abs(2.0, fp.alpha()));

  ChainSpec c;
  c.case_label = CaseLabel::Characteristic;
  c.tau = tau;
  c.points = {
      {x, y, 0.0},
      {x, yp, lifted},
      {ax / 2.0, yp, lifted},
      {ax / 2.0, yp + tau, top},
      {xp, yp + tau, top},
      {xp, yp, top - fp.abs_pow(xp) * tau},
  };
  const double shift = ax / 2.0 - x;
  c.segments = {
      {Generator::PlusX2, dy},
      {shift >= 0.0 ? Generator::PlusX1 : Generator::MinusX1, std::fabs(shift)},
      {Generator::PlusX2, tau},
      {Generator::PlusX1, xp - ax / 2.0},
      {Generator::MinusX2, tau},
  };
  return c;
}

double nonchar_z_prime(double x, double x_prime, double dy, const FrameParams& fp) {
  const double sigma = dy + x - x_prime;
  return sigma * fp.abs_pow(x) + fp.integral(x, x_prime);
}

RootResult solve_tau(double x_prime, double target, const FrameParams& fp) {
  if (target < 0.0) throw std::domain_error("tau equation needs a nonnegative right-hand side");
  if (target == 0.0) return {0.0, 0.0, 0};
  // (x'+t)^alpha - x'^alpha without cancellation when t << x'
  const double base = fp.abs_pow(x_prime);
  auto rise = [&](double t) {
    if (x_prime > 0.0 && t <= x_prime) {
      return base * std::expm1(fp.alpha() * std::log1p(t / x_prime));
    }
    return fp.abs_pow(x_prime + t) - base;
  };
  auto g = [&](double t) { return t * rise(t) - target; };
  // Size estimate min{sqrt(z'/x'^(alpha-1)), z'^(1/(alpha+1))}, doubled until bracketing.
  double hi = pow_abs(target, 1.0 / (fp.alpha() + 1.0));
  if (x_prime > 0.0) {
    hi = std::min(hi, std::sqrt(target / pow_abs(x_prime, fp.alpha() - 1.0)));
  }
  return solve_increasing_from_zero(g, std::max(hi, 1e-300), 0.0);
}

double tau_nonchar(double x, double x_prime, double dy, const FrameParams& fp,
                   const ChainConfig& cfg) {
  if (!(x >= x_prime && x_prime >= 0.0 && dy >= 0.0)) {
    throw std::domain_error("tau_nonchar needs x >= x' >= 0 and dy >= 0");
  }
  double zp = nonchar_z_prime(x, x_prime, dy, fp);
  if (zp < 0.0) {
    const double scale = (dy + x - x_prime) * fp.abs_pow(x);
    if (zp < -1e-13 * scale) throw std::domain_error("negative z' in tau_nonchar");
    zp = 0.0;
  }
  const RootResult r = solve_tau(x_prime, zp, fp);
  if (std::fabs(r.residual) > cfg.root_tol * (1.0 + zp)) {
    throw std::runtime_error("tau root did not reach the requested residual");
  }
  return r.root;
}

ChainSpec nonchar_chain(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                        const ChainConfig& cfg) {
  const double x = u.x, y = u.y, xp = v.x, yp = v.y;
  if (!(y <= yp) || !(x >= xp && xp >= 0.0)) {
    throw std::domain_error("nonchar_chain needs y <= y' and x >= x' >= 0");
  }
  const double sigma = yp - y + x - xp;
  double zp = std::max(nonchar_z_prime(x, xp, yp - y, fp), 0.0);
  const double tau = tau_nonchar(x, xp, yp - y, fp, cfg);
  const double rise = fp.integral_step(xp, tau);
  const double z3 = zp + fp.abs_pow(xp) * tau;
  const double z4 = z3 + rise;
  const double z5 = z4 - fp.abs_pow(xp + tau) * tau;

  ChainSpec c;
  c.case_label = CaseLabel::Noncharacteristic;
  c.sigma = sigma;
  c.tau = tau;
  c.z_prime = zp;
  c.points = {
      {x, y, 0.0},
      {x, y + sigma, fp.abs_pow(x) * sigma},
      {xp, yp, zp},
      {xp, yp + tau, z3},
      {xp + tau, yp + 2.0 * tau, z4},
      {xp + tau, yp + tau, z5},
      {xp, yp, z5 - rise},
  };
  c.segments = {
      {Generator::PlusX2, sigma},  {Generator::MinusZ, x - xp}, {Generator::PlusX2, tau},
      {Generator::PlusZ, tau},     {Generator::MinusX2, tau},   {Generator::MinusZ, tau},
  };
  return c;
}

std::vector<ChainSpec> chains_for_pair(const SurfacePoint& u, const SurfacePoint& v,
                                       const FrameParams& fp, const ChainConfig& cfg) {
  const CaseLabel label = classify(u, v, fp, cfg);
  auto build = [&](const Normalization& n, ChainKind kind) {
    std::vector<ChainSpec> chains;
    for (const auto& pair : n.pairs) {
      ChainSpec c = kind == ChainKind::Characteristic ? char_chain(pair.from, pair.to, fp)
                                                      : nonchar_chain(pair.from, pair.to, fp, cfg);
      c.reflected = n.reflected;
      c.case_label = label;
      chains.push_back(std::move(c));
    }
    return chains;
  };
  if (label != CaseLabel::Characteristic) {
    try {
      return build(normalize(u, v, ChainKind::Noncharacteristic), ChainKind::Noncharacteristic);
    } catch (const std::domain_error&) {
      // Opposite signs or far from parallel: use the characteristic chain.
    }
  }
  return build(normalize(u, v, ChainKind::Characteristic), ChainKind::Characteristic);
}

double replay_error(const ChainSpec& chain, const FrameParams& fp) {
  double err = 0.0;
  if (chain.points.empty()) return err;
  SpacePoint cur = chain.points.front();
  for (std::size_t i = 0; i < chain.segments.size(); ++i) {
    cur = flow(cur, chain.segments[i].control(), fp);
    err = std::max(err, relative_error(cur, chain.points[i + 1]));
  }
  const SpacePoint& last = chain.points.back();
  err = std::max(err, relative_error(cur, {last.x, last.y, 0.0}));
  return err;
}

double min_height(const ChainSpec& chain, const FrameParams& fp, int per_segment) {
  const HorizontalPath path = chain.path();
  const std::size_t n = path.segments.size();
  const std::size_t split = n / 2;
  double lowest = 0.0;
  auto scan = [&](SpacePoint cur, const ControlSegment& seg) {
    for (int k = 0; k <= per_segment; ++k) {
      const double t = seg.duration() * k / per_segment;
      lowest = std::min(lowest, flow_partial(cur, seg, t, fp).z);
    }
    return flow(cur, seg, fp);
  };
  SpacePoint cur = path.start;
  for (std::size_t i = 0; i < split; ++i) cur = scan(cur, path.segments[i]);
  const SurfacePoint end = chain.to();
  cur = end.lifted();
  for (std::size_t i = n; i-- > split;) {
    const ControlSegment& s = path.segments[i];
    cur = scan(cur, ControlSegment(-s.e1(), -s.e2(), s.duration()));
  }
  return lowest;
}

ChainAudit chain_audit(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                       const ChainConfig& cfg) {
  ChainAudit a;
  a.case_label = classify(u, v, fp, cfg);
  const auto chains = chains_for_pair(u, v, fp, cfg);
  a.n_chains = static_cast<int>(chains.size());
  for (const auto& c : chains) {
    a.endpoint_err = std::max(a.endpoint_err, replay_error(c, fp));
    a.max_z_violation = std::max(a.max_z_violation, -min_height(c, fp));
    a.length += path_length(c.path()).sup_norm;
  }
  const double d = delta_plane(u, v, fp);
  a.length_over_delta = d > 0.0 ? a.length / d : 0.0;
  return a;
}

double gradient_line_integral(const ScalarField& f, const ChainSpec& chain,
                              const FrameParams& fp) {
  const HorizontalPath path = chain.path();
  double total = 0.0;
  SpacePoint cur = path.start;
  for (const auto& seg : path.segments) {
    if (seg.duration() > 0.0) {
      const double speed = seg.euclid_speed();
      auto integrand = [&](double t) {
        SpacePoint q = flow_partial(cur, seg, t, fp);
        q.z = std::max(q.z, 0.0);  // rounding below the boundary plane
        const auto g = x_gradient(f, q, fp);
        return speed * std::hypot(g[0], g[1]);
      };
      // The absolute floor stops the recursion where |Xf| underflows along the segment.
      total += adaptive_simpson(integrand, 0.0, seg.duration(), 1e-8, 40, 1e-13);
    }
    cur = flow(cur, seg, fp);
  }
  return total;
}

// First-run frozen regression values: the largest length / delta_plane seen on
// 10^4 sampled pairs per case for alpha in {1, 1.5, 2, 3} was 21.2
// (characteristic) and 14.8 (noncharacteristic).
double chain_length_band(const FrameParams& fp, ChainKind kind) {
  (void)fp;
  return kind == ChainKind::Characteristic ? 24.0 : 17.0;
}

std::pair<SurfacePoint, SurfacePoint> sample_case_pair(ChainKind kind, const FrameParams& fp,
                                                       const ChainConfig& cfg, Rng& rng) {
  const CaseLabel want =
      kind == ChainKind::Characteristic ? CaseLabel::Characteristic : CaseLabel::Noncharacteristic;
  for (;;) {
    SurfacePoint u, v;
    if (kind == ChainKind::Characteristic) {
      const double s = std::pow(10.0, rng.uniform(-2.0, 1.0));
      u = {s * rng.uniform(-1.0, 1.0) / cfg.eps0, rng.uniform(-3.0, 3.0)};
      v = {u.x + s * rng.uniform(-1.0, 1.0), u.y + s * rng.uniform(-1.0, 1.0)};
    } else {
      const double mag = std::pow(10.0, rng.uniform(-1.0, 1.5));
      const double x = rng.coin() ? mag : -mag;
      const double reach = cfg.eps0 * mag;
      u = {x, rng.uniform(-3.0, 3.0)};
      const double dx = reach * rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-2.0, 0.0));
      const double dy =
          reach * reach / mag * rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-3.0, 0.0));
      v = {x + dx, u.y + dy};
    }
    if (classify(u, v, fp, cfg) == want) return {u, v};
  }
}

double z_hat(double x_prime, double h1, double h2, const FrameParams& fp) {
  const double xa = x_prime + h1;
  return h2 * h2 * pow_abs(xa, fp.alpha() - 1.0) + h1 * fp.abs_pow(xa) -
         fp.integral_step(x_prime, h1);
}

double tau_hat(double x_prime, double h1, double h2, const FrameParams& fp) {
  return solve_tau(x_prime, std::max(z_hat(x_prime, h1, h2, fp), 0.0), fp).root;
}

double tau_hat_sensitivity(double x_prime, double h1, double h2, const FrameParams& fp) {
  const double step = 1e-4 * x_prime;
  auto g = [&](double xp) { return fp.abs_pow(xp) * tau_hat(xp, h1, h2, fp); };
  const double deriv = (g(x_prime + step) - g(x_prime - step)) / (2.0 * step);
  return std::fabs(deriv) / fp.abs_pow(x_prime);
}

double time_change_defect(double x, double h1, double h2, double t, const FrameParams& fp) {
  const double a = fp.alpha();
  const double s = h2 * h2 / x + h1;
  const double w = x - t;
  const double ratio = pow_abs(x / w, a);  // x^alpha / (x-t)^alpha
  return std::fabs(a * s * ratio / w + a / (a + 1.0) * (1.0 - ratio * x / w));
}

MonotonicityReport monotonicity_audits(const FrameParams& fp, const MonotonicityGrid& grid) {
  MonotonicityReport rep;
  rep.alpha = fp.alpha();
  for (double eps0 : grid.eps0) {
    MonotonicityRow row;
    row.eps0 = eps0;
    for (int k = 0; k < grid.angles; ++k) {
      const double theta = (k + 0.5) * 0.5 * std::numbers::pi / grid.angles;
      const double h1 = std::cos(theta);
      const double h2 = std::sin(theta);
      for (double m : grid.multiples) {
        const double xp = m / eps0;
        row.sigma0 = std::max(row.sigma0, tau_hat_sensitivity(xp, h1, h2, fp));
        for (int j = 0; j <= 16; ++j) {
          const double t = h1 * j / 16.0;
          row.time_defect = std::max(row.time_defect, time_change_defect(xp, h1, h2, t, fp));
        }
      }
    }
    rep.rows.push_back(row);
  }
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const bool smaller_eps = rep.rows[i].eps0 < rep.rows[i - 1].eps0;
    if (smaller_eps && (rep.rows[i].sigma0 >= rep.rows[i - 1].sigma0 ||
                        rep.rows[i].time_defect >= rep.rows[i - 1].time_defect)) {
      rep.decreasing = false;
    }
  }
  return rep;
}

}  // namespace martinet
