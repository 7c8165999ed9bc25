// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "martinet/chains.hpp"
#include "martinet/fields.hpp"
#include "martinet/flows.hpp"
#include "martinet/geometry.hpp"
#include "martinet/numerics.hpp"
#include "martinet/oracle.hpp"
#include "martinet/trace.hpp"

using namespace martinet;

namespace {

// Pinned tolerances and budgets.
constexpr double kAlphas[] = {1.0, 1.5, 2.0, 3.0};
constexpr int kSymmetryTuples = 100000;
constexpr double kSymmetryTol = 1e-12;
constexpr int kBallBoxTriples = 10000;
constexpr int kOraclePairs = 200;
constexpr std::uint64_t kOracleSeed = 7;
constexpr double kEquivalenceCeiling = 10.0;
constexpr int kStokesTuples = 1000;
constexpr double kStokesTol = 1e-8;
constexpr int kChainPairs = 10000;
constexpr double kClosureTol = 1e-9;
constexpr double kHeightTol = 1e-12;
constexpr double kWorkedTol = 1e-12;
constexpr int kRootTuples = 10000;
constexpr double kRootTol = 1e-12;
constexpr std::int64_t kTraceSamples = 1000000;
constexpr double kDilationTol = 0.02;
constexpr int kPointwiseTuples = 1000;
constexpr double kPointwiseSlack = 1e-7;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail,
            std::chrono::steady_clock::time_point start) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %2d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double signed_log(Rng& rng, double lo = -2.0, double hi = 2.0) {
  const double m = std::pow(10.0, rng.uniform(lo, hi));
  return rng.coin() ? m : -m;
}

// y, z coordinates and translations on the grid 2^-40 with magnitude below
// 2^8, so translated coordinates are exact and any deviation is delta's own.
double dyadic(double t) { return std::ldexp(std::nearbyint(std::ldexp(t, 40)), -40); }

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

void symmetry() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  double worst = 0.0;
  for (double a : kAlphas) {
    const FrameParams fp(a);
    for (int i = 0; i < kSymmetryTuples; ++i) {
      const SpacePoint p{signed_log(rng), dyadic(signed_log(rng)), dyadic(signed_log(rng))};
      const SpacePoint q{signed_log(rng), dyadic(signed_log(rng)), dyadic(signed_log(rng))};
      const double d = delta(p, q, fp).total;
      SymmetrySpec t;
      t.translate_y = dyadic(signed_log(rng));
      t.translate_z = dyadic(signed_log(rng));
      SymmetrySpec refl;
      refl.reflect_x = true;
      const double r = std::pow(10.0, rng.uniform(-3.0, 3.0));
      worst = std::max(worst, rel_diff(delta(apply_symmetry(p, t), apply_symmetry(q, t), fp).total, d));
      worst = std::max(worst,
                       rel_diff(delta(apply_symmetry(p, refl), apply_symmetry(q, refl), fp).total, d));
      worst = std::max(worst, rel_diff(delta(dilate(p, r, fp), dilate(q, r, fp), fp).total, r * d));
    }
  }
  report(1, worst <= kSymmetryTol, "delta symmetries",
         fmt("max relative deviation %.3g over 1e5 tuples per alpha (tol 1e-12)", worst), t0);
}

void ball_box() {
  const auto t0 = std::chrono::steady_clock::now();
  int disagreements = 0;
  int inside = 0;
  for (double a : kAlphas) {
    const BallBoxAudit audit = ballbox_audit(FrameParams(a), kBallBoxTriples, 11);
    disagreements += audit.disagreements;
    inside += audit.inside;
  }
  report(2, disagreements == 0, "ball-box identity",
         fmt("%.0f disagreements, %.0f of 4e4 triples inside", disagreements, inside), t0);
}

void bracket() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double a : kAlphas) {
    const FrameParams fp(a);
    const EquivalenceReport rep = equivalence_audit(fp, kOraclePairs, kOracleSeed);
    const double k = equivalence_band(fp);
    const bool ok = rep.sandwich_violations == 0 && rep.band_violations == 0 &&
                    rep.uncertified == 0 && k <= kEquivalenceCeiling &&
                    rep.upper_over_delta.max <= k && rep.delta_over_lower.max <= k;
    pass = pass && ok;
    detail += fmt("a=%.1f up/d<=%.2f d/lo<=%.2f", a, rep.upper_over_delta.max,
                  rep.delta_over_lower.max);
    detail += "; ";
  }
  detail += fmt("K=%.1f, 8 segments, 16 starts", equivalence_band(FrameParams(2.0)));
  report(3, pass, "distance bracket", detail, t0);
}

void stokes() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(3);
  double worst = 0.0;
  for (int i = 0; i < kStokesTuples; ++i) {
    const double a = rng.uniform(1.0, 4.0);
    const FrameParams fp(a);
    const double x = rng.coin() ? 0.0 : std::pow(10.0, rng.uniform(-2.0, 1.0));
    const double u = std::pow(10.0, rng.uniform(-2.0, 1.0));
    // Green: the lift of a closed loop gains the integral of d/dx |x|^alpha over its interior.
    const double area =
        u * adaptive_simpson([a](double s) { return a * std::pow(s, a - 1.0); }, x, x + u, 1e-13);
    const double lifted = square_loop_path({x, 0.0, 0.0}, u, true, fp).endpoint(fp).z;
    worst = std::max(worst, rel_diff(square_loop_z(x, u, fp), area));
    worst = std::max(worst, rel_diff(lifted, area));
  }
  report(4, worst <= kStokesTol, "Stokes lift",
         fmt("max relative deviation %.3g over 1e3 tuples (tol 1e-8)", worst), t0);
}

double worked_examples_error() {
  const FrameParams f1(1.0);
  double worst = 0.0;
  auto cmp = [&](const SpacePoint& p, const SpacePoint& q) {
    worst = std::max(worst, relative_error(p, q));
  };
  const ChainSpec c = char_chain({1, 0}, {2, 1}, f1);
  const std::vector<SpacePoint> want_c = {{1, 0, 0},           {1, 1, 1},
                                          {0.5, 1, 1},         {0.5, 5.0 / 3.0, 4.0 / 3.0},
                                          {2, 5.0 / 3.0, 4.0 / 3.0}, {2, 1, 0}};
  if (c.points.size() != want_c.size()) return 1.0;
  for (std::size_t i = 0; i < want_c.size(); ++i) cmp(c.points[i], want_c[i]);
  worst = std::max(worst, rel_diff(c.tau, 2.0 / 3.0));

  const ChainSpec n = nonchar_chain({2, 0}, {1, 1}, f1, ChainConfig());
  const double t = std::sqrt(2.5);
  const std::vector<SpacePoint> want_n = {{2, 0, 0},
                                          {2, 2, 4},
                                          {1, 1, 2.5},
                                          {1, 1 + t, 2.5 + t},
                                          {1 + t, 1 + 2 * t, 2.5 + t + (t + t * t / 2)},
                                          {1 + t, 1 + t, 2.5 + t - t * t / 2},
                                          {1, 1, 0}};
  if (n.points.size() != want_n.size()) return 1.0;
  for (std::size_t i = 0; i < want_n.size(); ++i) cmp(n.points[i], want_n[i]);
  worst = std::max(worst, rel_diff(n.tau, t));
  return worst;
}

void chains() {
  const auto t0 = std::chrono::steady_clock::now();
  const ChainConfig cfg;
  double closure = 0.0;
  double height = 0.0;
  for (double a : kAlphas) {
    const FrameParams fp(a);
    Rng rng(500 + static_cast<std::uint64_t>(10 * a));
    for (ChainKind kind : {ChainKind::Characteristic, ChainKind::Noncharacteristic}) {
      for (int i = 0; i < kChainPairs; ++i) {
        const auto [u, v] = sample_case_pair(kind, fp, cfg, rng);
        const ChainAudit audit = chain_audit(u, v, fp, cfg);
        closure = std::max(closure, audit.endpoint_err);
        height = std::max(height, audit.max_z_violation);
      }
    }
  }
  const double worked = worked_examples_error();
  const bool pass = closure <= kClosureTol && height <= kHeightTol && worked <= kWorkedTol;
  report(5, pass, "chain closure",
         fmt("closure %.3g (tol 1e-9), z dip %.3g (tol 1e-12), worked examples %.3g (tol 1e-12)",
             closure, height, worked),
         t0);
}

void roots() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(6);
  const ChainConfig cfg;
  double sqrt_err = 0.0;
  double residual = 0.0;
  for (double a : kAlphas) {
    const FrameParams fp(a);
    for (int i = 0; i < kRootTuples; ++i) {
      const double xp = rng.coin() ? 0.0 : std::pow(10.0, rng.uniform(-3.0, 3.0));
      const double x = xp + std::pow(10.0, rng.uniform(-3.0, 3.0));
      const double dy = std::pow(10.0, rng.uniform(-3.0, 3.0));
      const double zp = nonchar_z_prime(x, xp, dy, fp);
      const RootResult r = solve_tau(xp, zp, fp);
      residual = std::max(residual, std::fabs(r.residual) / (1.0 + zp));
      if (a == 1.0) {
        sqrt_err = std::max(sqrt_err, rel_diff(tau_nonchar(x, xp, dy, fp, cfg), std::sqrt(zp)));
      }
    }
  }
  report(6, sqrt_err <= kRootTol && residual <= kRootTol, "root finder",
         fmt("alpha=1 tau vs sqrt(z') %.3g, scaled residual %.3g (tol 1e-12)", sqrt_err,
             residual),
         t0);
}

void ahlfors() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  int crossover = 0;
  double lo = 1e300, hi = 0.0;
  double band = 0.0;
  for (double a : kAlphas) {
    const FrameParams fp(a);
    const AhlforsReport rep = ahlfors_audit(fp, AhlforsGrid::standard(), AhlforsMcConfig{});
    pass = pass && rep.violations == 0 && rep.inconclusive == 0;
    band = std::max(band, rep.bands.perimeter_hi);
    for (const auto& row : rep.rows) {
      lo = std::min(lo, row.ratio_perimeter);
      hi = std::max(hi, row.ratio_perimeter);
      if (row.x == row.r) {
        ++crossover;
        pass = pass && row.status == "ok";
      }
    }
  }
  pass = pass && crossover > 0;
  report(7, pass, "Ahlfors audit",
         fmt("mu r / vol in [%.3f, %.3f], band [1/C, C] with C=%.1f", lo, hi, band) +
             fmt(", %.0f crossover rows ok", crossover),
         t0);
}

void trace() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double a : {1.0, 2.0}) {
    const FrameParams fp(a);
    const ScalarField f = builtin_field("gauss", fp);
    for (double p : {1.5, 2.0, 3.0}) {
      const BesovParams bp(p);
      TraceConfig cfg;
      cfg.mc.samples = kTraceSamples;
      cfg.mc.seed = 1;
      const TraceReport r1 = trace_ratio(f, fp, bp, cfg);
      const TraceReport again = trace_ratio(f, fp, bp, cfg);
      cfg.mc.seed = 2;
      const TraceReport r2 = trace_ratio(f, fp, bp, cfg);
      cfg.mc.seed = 1;
      double dil = 0.0;
      for (double r : {0.5, 2.0}) {
        const TraceReport d = trace_ratio(dilated(f, r, fp), fp, bp, cfg);
        dil = std::max(dil, rel_diff(d.ratio, r1.ratio));
      }
      const bool finite = std::isfinite(r1.ratio) && r1.ratio > 0.0;
      const bool seeds =
          std::fabs(r1.ratio - r2.ratio) <= r1.ratio_half_width + r2.ratio_half_width;
      const bool cutoff = r1.lhs.cutoff_converged && r2.lhs.cutoff_converged;
      const bool ok = finite && seeds && cutoff && dil <= kDilationTol &&
                      again.ratio == r1.ratio && r1.rhs.converged;
      pass = pass && ok;
      detail += fmt("(%.0f,%.1f) ", a, p) + fmt("%.3f+-%.3f", r1.ratio, r1.ratio_half_width);
      if (!ok) detail += " !";
      detail += "; ";
    }
  }
  detail += "seeds 1/2 within summed CI, dilation r in {0.5,2} within 2%, cutoff converged";
  report(8, pass, "trace functional", detail, t0);
}

void pointwise() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(9);
  const ChainConfig cfg;
  double worst = -1e300;
  int violations = 0;
  for (int i = 0; i < kPointwiseTuples; ++i) {
    const double a = kAlphas[i % 4];
    const FrameParams fp(a);
    const ScalarField f = random_smooth_field(1000 + i);
    SurfacePoint u, v;
    switch (i % 3) {
      case 0: std::tie(u, v) = sample_case_pair(ChainKind::Characteristic, fp, cfg, rng); break;
      case 1: std::tie(u, v) = sample_case_pair(ChainKind::Noncharacteristic, fp, cfg, rng); break;
      default:
        u = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
        v = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    }
    const PointwiseBound b = pointwise_bound(f, u, v, fp, cfg);
    worst = std::max(worst, b.difference - b.bound);
    if (b.difference > b.bound + kPointwiseSlack) ++violations;
  }
  report(9, violations == 0, "pointwise trace bound",
         fmt("%.0f violations, max(difference - bound) = %.3g (slack 1e-7)", violations, worst),
         t0);
}

void monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double a : kAlphas) {
    const MonotonicityReport rep = monotonicity_audits(FrameParams(a));
    pass = pass && rep.decreasing && rep.rows.size() == 3;
    detail += fmt("a=%.1f sigma0", a);
    for (const auto& row : rep.rows) detail += fmt(" %.3g", row.sigma0);
    detail += "; ";
  }
  detail += "eps0 = 0.1, 0.05, 0.01";
  report(10, pass, "monotonicity audits", detail, t0);
}

}  // namespace

int main() {
  symmetry();
  ball_box();
  bracket();
  stokes();
  chains();
  roots();
  ahlfors();
  trace();
  pointwise();
  monotonicity();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
