#include "martinet/trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "martinet/numerics.hpp"

namespace martinet {

namespace {

struct Axis {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Axis tensor_axis(double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  Axis ax;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + h * (k + 0.5);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      ax.nodes.push_back(mid + 0.5 * h * rule.nodes[i]);
      ax.weights.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return ax;
}

double energy_at(const ScalarField& f, const FrameParams& fp, double p, const SupportHint& box,
                 int panels, int order) {
  const Axis ax = tensor_axis(-box.x, box.x, panels, order);
  const Axis ay = tensor_axis(-box.y, box.y, panels, order);
  const Axis az = tensor_axis(0.0, box.z, panels, order);
  std::vector<double> slabs(ax.nodes.size(), 0.0);
  parallel_for(ax.nodes.size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < ay.nodes.size(); ++j) {
      double col = 0.0;
      for (std::size_t k = 0; k < az.nodes.size(); ++k) {
        const auto g = x_gradient(f, {ax.nodes[i], ay.nodes[j], az.nodes[k]}, fp);
        col += az.weights[k] * std::pow(std::hypot(g[0], g[1]), p);
      }
      s += ay.weights[j] * col;
    }
    slabs[i] = ax.weights[i] * s;
  });
  double total = 0.0;
  for (double s : slabs) total += s;
  return total;
}

// Boundary points are drawn with density proportional to |x|^alpha on a
// mixture of two centred boxes, the outer truncation box and a core box a
// quarter of its size; the second point alternatively as a log-uniform
// offset from the first. Every scale is tied to the support hint, so the
// sample cloud dilates with the field.
struct Proposal {
  static constexpr double kCoreFraction = 0.25;
  static constexpr double kCoreWeight = 0.6;
  static constexpr double kLocalWeight = 0.5;
  double lx, ly, scale;
  double z_outer, z_core;
  double a_lo, a_hi, b_lo, b_hi;

  bool in_box(const SurfacePoint& w, double frac = 1.0) const {
    return std::fabs(w.x) <= frac * lx && std::fabs(w.y) <= frac * ly;
  }

  SurfacePoint draw_global(Rng& rng, const FrameParams& fp) const {
    const double frac = rng.uniform() < kCoreWeight ? kCoreFraction : 1.0;
    const double m = frac * lx * std::pow(rng.uniform_open0(), 1.0 / (fp.alpha() + 1.0));
    const double x = rng.coin() ? m : -m;
    return {x, rng.uniform(-frac * ly, frac * ly)};
  }

  // Global density divided by |x|^alpha.
  double global_coeff(const SurfacePoint& w) const {
    double q = 0.0;
    if (in_box(w)) q += (1.0 - kCoreWeight) / z_outer;
    if (in_box(w, kCoreFraction)) q += kCoreWeight / z_core;
    return q;
  }

  double global_density(const SurfacePoint& w, const FrameParams& fp) const {
    return global_coeff(w) * fp.abs_pow(w.x);
  }

  SurfacePoint draw_local(const SurfacePoint& u, Rng& rng) const {
    const double a = a_lo * std::exp(rng.uniform() * std::log(a_hi / a_lo));
    const double b = b_lo * std::exp(rng.uniform() * std::log(b_hi / b_lo));
    return {u.x + (rng.coin() ? a : -a), u.y + (rng.coin() ? b : -b)};
  }

  SurfacePoint draw_second(const SurfacePoint& u, Rng& rng, const FrameParams& fp) const {
    return rng.uniform() < kLocalWeight ? draw_local(u, rng) : draw_global(rng, fp);
  }

  double second_density(const SurfacePoint& u, const SurfacePoint& v,
                        const FrameParams& fp) const {
    double q = (1.0 - kLocalWeight) * global_density(v, fp);
    const double a = std::fabs(v.x - u.x);
    const double b = std::fabs(v.y - u.y);
    if (a >= a_lo && a <= a_hi && b >= b_lo && b <= b_hi) {
      q += kLocalWeight / (4.0 * a * b * std::log(a_hi / a_lo) * std::log(b_hi / b_lo));
    }
    return q;
  }
};

double kernel(const SurfacePoint& u, double d, double p, const FrameParams& fp) {
  return 1.0 / (std::pow(d, p - 1.0) * ahlfors_surrogate(u, d, fp));
}

struct PairTerm {
  double d_direct = 0.0, c_direct = 0.0;
  double d_swapped = 0.0, c_swapped = 0.0;
};

MeasureEstimate estimate_from(const std::vector<PairTerm>& terms, double delta_min,
                              const McConfig& cfg) {
  std::vector<double> vals(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const PairTerm& t = terms[i];
    vals[i] = (t.d_direct >= delta_min ? t.c_direct : 0.0) +
              (t.d_swapped >= delta_min ? t.c_swapped : 0.0);
  }
  const MeanStat st = mean_ci(vals);
  MeasureEstimate est;
  est.value = st.mean;
  est.half_width = st.half_width;
  est.n_samples = static_cast<std::int64_t>(terms.size());
  est.seed = cfg.seed;
  return est;
}

}  // namespace

EnergyEstimate sobolev_energy(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                              const QuadConfig& cfg) {
  if (cfg.min_panels < 1 || cfg.max_panels < cfg.min_panels) {
    throw std::invalid_argument("quadrature panel counts are inconsistent");
  }
  const double trunc = f.support.compact ? 1.0 : cfg.truncation;
  const SupportHint box{trunc * f.support.x, trunc * f.support.y, trunc * f.support.z};
  EnergyEstimate est;
  int n = cfg.min_panels;
  double prev = energy_at(f, fp, bp.p, box, n, cfg.order);
  est.value = prev;
  est.panels = n;
  while (n < cfg.max_panels) {
    n *= 2;
    const double cur = energy_at(f, fp, bp.p, box, n, cfg.order);
    est.value = cur;
    est.panels = n;
    est.error = std::fabs(cur - prev);
    if (est.error <= cfg.rel_tol * std::fabs(cur)) {
      est.converged = true;
      break;
    }
    prev = cur;
  }
  return est;
}

BesovEstimate besov_seminorm(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                             const McConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("besov_seminorm needs samples >= 1");
  if (!(cfg.cutoff > 0.0) || cfg.cutoff_halvings < 0) {
    throw std::invalid_argument("cutoff must be > 0");
  }
  const double p = bp.p;
  Proposal prop;
  prop.lx = cfg.truncation * f.support.x;
  prop.ly = cfg.truncation * f.support.y;
  prop.scale = std::max(prop.lx, prop.ly);
  auto box_mass = [&](double frac) {
    return 4.0 * frac * prop.ly * pow_abs(frac * prop.lx, fp.alpha() + 1.0) / (fp.alpha() + 1.0);
  };
  prop.z_outer = box_mass(1.0);
  prop.z_core = box_mass(Proposal::kCoreFraction);
  const double delta_min = cfg.cutoff * prop.scale;
  prop.a_lo = 1e-2 * delta_min;
  prop.a_hi = cfg.far_reach * prop.scale;
  prop.b_lo = 1e-2 * delta_min * delta_min / prop.scale;
  prop.b_hi = cfg.far_reach * prop.scale;
  const double smallest = delta_min / std::pow(2.0, cfg.cutoff_halvings);

  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  std::vector<PairTerm> terms(n);
  std::vector<std::pair<SurfacePoint, SurfacePoint>> points(cfg.dump ? n : 0);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(cfg.seed, c);
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      SurfacePoint u = prop.draw_global(rng, fp);
      SurfacePoint v = prop.draw_second(u, rng, fp);
      const double qv = prop.second_density(u, v, fp);
      const double weight = qv > 0.0 ? fp.abs_pow(v.x) / (prop.global_coeff(u) * qv) : 0.0;
      const bool outside = !prop.in_box(v);
      if (cfg.reflect) {
        u.x = -u.x;
        v.x = -v.x;
      }
      if (cfg.dump) points[i] = {u, v};
      PairTerm& t = terms[i];
      t.d_direct = delta_plane(u, v, fp);
      if (outside) t.d_swapped = delta_plane(v, u, fp);
      if (t.d_direct < smallest && t.d_swapped < smallest) continue;
      const double g = std::pow(std::fabs(f.value(u.lifted()) - f.value(v.lifted())), p);
      if (g == 0.0) continue;
      if (t.d_direct >= smallest) t.c_direct = weight * g * kernel(u, t.d_direct, p, fp);
      if (t.d_swapped >= smallest) t.c_swapped = weight * g * kernel(v, t.d_swapped, p, fp);
    }
  });

  BesovEstimate out;
  for (int k = 0; k <= cfg.cutoff_halvings; ++k) {
    const double dm = delta_min / std::pow(2.0, k);
    out.cutoff_study.push_back({dm, estimate_from(terms, dm, cfg)});
  }
  out.estimate = out.cutoff_study.front().estimate;
  out.cutoff_converged = true;
  for (std::size_t k = 1; k < out.cutoff_study.size(); ++k) {
    const auto& a = out.cutoff_study[k - 1].estimate;
    const auto& b = out.cutoff_study[k].estimate;
    if (std::fabs(b.value - a.value) > b.half_width) out.cutoff_converged = false;
  }

  std::map<int, double> decades;
  for (const PairTerm& t : terms) {
    if (t.d_direct >= delta_min && t.c_direct != 0.0) {
      decades[static_cast<int>(std::floor(std::log10(t.d_direct / prop.scale)))] += t.c_direct;
    }
    if (t.d_swapped >= delta_min && t.c_swapped != 0.0) {
      decades[static_cast<int>(std::floor(std::log10(t.d_swapped / prop.scale)))] += t.c_swapped;
    }
  }
  for (const auto& [k, s] : decades) out.decades.push_back({k, s / static_cast<double>(n)});

  if (cfg.dump) {
    cfg.dump->clear();
    for (std::size_t i = 0; i < n; ++i) {
      const PairTerm& t = terms[i];
      const double c = (t.d_direct >= delta_min ? t.c_direct : 0.0) +
                       (t.d_swapped >= delta_min ? t.c_swapped : 0.0);
      cfg.dump->push_back({points[i].first, points[i].second, t.d_direct, c});
    }
  }
  return out;
}

TraceReport trace_ratio(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                        const TraceConfig& cfg) {
  TraceReport rep;
  rep.function = f.name;
  rep.alpha = fp.alpha();
  rep.p = bp.p;
  rep.config = cfg;
  rep.config.mc.dump = nullptr;
  rep.lhs = besov_seminorm(f, fp, bp, cfg.mc);
  rep.rhs = sobolev_energy(f, fp, bp, cfg.quad);
  const double lhs = rep.lhs.estimate.value;
  if (rep.rhs.value == 0.0) {
    if (lhs > 0.0) throw std::domain_error("zero energy with a positive seminorm");
    rep.degenerate = true;
  } else {
    rep.ratio = lhs / rep.rhs.value;
    rep.ratio_half_width = rep.lhs.estimate.half_width / rep.rhs.value;
  }
  const bool finite = std::isfinite(rep.ratio) && std::isfinite(rep.ratio_half_width);
  rep.status = finite && rep.rhs.converged && rep.lhs.cutoff_converged ? "ok" : "inconclusive";
  return rep;
}

PointwiseBound pointwise_bound(const ScalarField& f, const SurfacePoint& u, const SurfacePoint& v,
                               const FrameParams& fp, const ChainConfig& cfg) {
  PointwiseBound out;
  out.difference = std::fabs(f.value(u.lifted()) - f.value(v.lifted()));
  const auto chains = chains_for_pair(u, v, fp, cfg);
  out.n_chains = static_cast<int>(chains.size());
  for (const auto& c : chains) out.bound += gradient_line_integral(f, c, fp);
  return out;
}

}  // namespace martinet
