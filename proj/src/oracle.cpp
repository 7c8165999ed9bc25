#include "martinet/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "martinet/numerics.hpp"

namespace martinet {

// Lower bound. Let gamma : [0, T] -> R^3 be horizontal from p to q with
// |(h1, h2)| <= 1, so |h1|, |h2| <= 1 and |x(s) - x| <= s. Then
//   zeta = z - z' + |x|^alpha (y' - y) = -int_0^T (|x(s)|^alpha - |x|^alpha) h2(s) ds.
// The mean value theorem gives ||a|^alpha - |b|^alpha| <= alpha max(|a|,|b|)^(alpha-1) |a - b|,
// hence ||x(s)|^alpha - |x|^alpha| <= alpha (|x| + s)^(alpha-1) s and
//   |zeta| <= int_0^T alpha (|x| + s)^(alpha-1) s ds <= alpha (|x| + T)^(alpha-1) T^2 / 2 =: M(T).
// M is continuous, increasing and M(0) = 0, so T >= T* with M(T*) = |zeta|.
// Together with |x' - x| <= T and |y' - y| <= T this bounds every admissible T.
double vertical_time_bound(double abs_zeta, double abs_x, const FrameParams& fp) {
  if (abs_zeta == 0.0) return 0.0;
  const double alpha = fp.alpha();
  auto majorant = [&](double t) {
    return 0.5 * alpha * pow_abs(abs_x + t, alpha - 1.0) * t * t - abs_zeta;
  };
  double guess = pow_abs(2.0 * abs_zeta / alpha, 1.0 / (alpha + 1.0));
  if (abs_x > 0.0) {
    guess = std::min(guess, std::sqrt(2.0 * abs_zeta / (alpha * pow_abs(abs_x, alpha - 1.0))));
  }
  return solve_increasing_from_zero(majorant, guess, 0.0).root;
}

double cc_lower(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp) {
  const double z = zeta(p, q, fp);
  const double t_star = vertical_time_bound(std::fabs(z), std::fabs(p.x), fp);
  return std::max({std::fabs(q.x - p.x), std::fabs(q.y - p.y), t_star});
}

namespace {

enum class Route { Diagonal, XThenY, YThenX };

std::vector<ControlSegment> planar_moves(double dx, double dy, Route route) {
  std::vector<ControlSegment> moves;
  switch (route) {
    case Route::Diagonal: {
      const double len = std::hypot(dx, dy);
      if (len > 0.0) moves.emplace_back(dx / len, dy / len, len);
      break;
    }
    case Route::XThenY:
      if (dx != 0.0) moves.emplace_back(std::copysign(1.0, dx), 0.0, std::fabs(dx));
      if (dy != 0.0) moves.emplace_back(0.0, std::copysign(1.0, dy), std::fabs(dy));
      break;
    case Route::YThenX:
      if (dy != 0.0) moves.emplace_back(0.0, std::copysign(1.0, dy), std::fabs(dy));
      if (dx != 0.0) moves.emplace_back(std::copysign(1.0, dx), 0.0, std::fabs(dx));
      break;
  }
  return moves;
}

struct Candidate {
  double length = std::numeric_limits<double>::infinity();
  Route route = Route::Diagonal;
  bool loop_at_start = false;
  double side = 0.0;
  double residual = 0.0;
};

Candidate best_candidate(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp) {
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  Candidate best;
  for (Route route : {Route::Diagonal, Route::XThenY, Route::YThenX}) {
    double moves_len = 0.0;
    SpacePoint cur = p;
    for (const auto& seg : planar_moves(dx, dy, route)) {
      cur = flow(cur, seg, fp);
      moves_len += seg.duration() * seg.euclid_speed();
    }
    const double residual = q.z - cur.z;
    for (bool at_start : {false, true}) {
      const double side = residual == 0.0 ? 0.0 : square_loop_side(at_start ? p.x : q.x, residual, fp);
      const double len = moves_len + 4.0 * side;
      if (len < best.length) best = {len, route, at_start, side, residual};
    }
  }
  return best;
}

HorizontalPath build_candidate(const SpacePoint& p, const SpacePoint& q, const Candidate& c,
                               const FrameParams& fp) {
  HorizontalPath path;
  path.start = p;
  const auto moves = planar_moves(q.x - p.x, q.y - p.y, c.route);
  auto add_loop = [&](const SpacePoint& base) {
    if (c.side > 0.0) {
      const auto loop = square_loop_path(base, c.side, c.residual > 0.0, fp);
      path.segments.insert(path.segments.end(), loop.segments.begin(), loop.segments.end());
    }
  };
  if (c.loop_at_start) add_loop(p);
  path.segments.insert(path.segments.end(), moves.begin(), moves.end());
  if (!c.loop_at_start) add_loop({q.x, q.y, 0.0});
  path.resolve(fp);
  return path;
}

struct Controls {
  std::vector<double> theta;
  std::vector<double> time;
};

struct SearchResult {
  Controls controls;
  double objective = std::numeric_limits<double>::infinity();
  bool converged = false;
};

SpacePoint controls_endpoint(const SpacePoint& p, const Controls& c, const FrameParams& fp) {
  SpacePoint cur = p;
  for (std::size_t i = 0; i < c.theta.size(); ++i) {
    if (c.time[i] > 0.0) {
      cur = flow(cur, ControlSegment(std::cos(c.theta[i]), std::sin(c.theta[i]), c.time[i]), fp);
    }
  }
  return cur;
}

// Total time of the controls plus the explicit repair path from their
// endpoint to q. Every value is the length of a real path from p to q.
double objective(const SpacePoint& p, const SpacePoint& q, const Controls& c,
                 const FrameParams& fp) {
  double total = 0.0;
  for (double t : c.time) total += t;
  return total + best_candidate(controls_endpoint(p, c, fp), q, fp).length;
}

SearchResult coordinate_search(const SpacePoint& p, const SpacePoint& q, Controls c, double scale,
                               const FrameParams& fp, int budget) {
  const std::size_t n = c.theta.size();
  double best = objective(p, q, c, fp);
  int evals = 1;
  double theta_step = 0.5;
  double time_step = 0.5 * scale / static_cast<double>(n);
  const double floor_theta = 1e-10;
  const double floor_time = 1e-11 * scale;
  bool converged = false;
  while (evals < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < 2 * n && evals < budget; ++i) {
      const bool is_theta = i < n;
      double& slot = is_theta ? c.theta[i] : c.time[i - n];
      const double step = is_theta ? theta_step : time_step;
      const double saved = slot;
      for (double dir : {1.0, -1.0}) {
        slot = saved + dir * step;
        if (!is_theta && slot < 0.0) slot = 0.0;
        if (slot == saved) continue;
        const double value = objective(p, q, c, fp);
        ++evals;
        if (value < best) {
          best = value;
          improved = true;
          break;
        }
        slot = saved;
      }
    }
    if (!improved) {
      theta_step *= 0.5;
      time_step *= 0.5;
      if (theta_step < floor_theta && time_step < floor_time) {
        converged = true;
        break;
      }
    }
  }
  return {std::move(c), best, converged};
}

Controls refine(const Controls& coarse, int segments) {
  Controls fine;
  fine.theta.reserve(segments);
  fine.time.reserve(segments);
  const int m = static_cast<int>(coarse.theta.size());
  const int splits = segments / std::max(m, 1);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < splits; ++k) {
      fine.theta.push_back(coarse.theta[i]);
      fine.time.push_back(coarse.time[i] / splits);
    }
  }
  while (static_cast<int>(fine.theta.size()) < segments) {
    fine.theta.push_back(0.0);
    fine.time.push_back(0.0);
  }
  return fine;
}

struct LevelResult {
  SearchResult best;
  bool all_converged = true;
};

// Multi-start search at `segments` controls, warm-started from the best
// result at half as many, so refining never increases the objective.
LevelResult run_level(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp,
                      const OracleConfig& cfg, int segments, double scale) {
  std::vector<Controls> inits;
  LevelResult sub;
  const bool warm = segments > 1;
  if (warm) {
    sub = run_level(p, q, fp, cfg, segments / 2, scale);
    inits.push_back(refine(sub.best.controls, segments));
  }
  for (int s = 0; s < cfg.starts; ++s) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(segments) * 1000003u + s);
    Controls c;
    for (int i = 0; i < segments; ++i) {
      c.theta.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
      c.time.push_back(rng.uniform(0.0, 2.0 * scale / segments));
    }
    inits.push_back(std::move(c));
  }
  std::vector<SearchResult> results(inits.size());
  parallel_for(
      inits.size(),
      [&](std::size_t i) {
        results[i] = coordinate_search(p, q, inits[i], scale, fp, cfg.max_evals_per_start);
      },
      cfg.threads);
  LevelResult out;
  out.all_converged = !warm || sub.all_converged;
  // Splitting controls perturbs the endpoint at rounding level and the
  // vertical repair amplifies that like a square root, so the coarse optimum
  // itself stays a candidate.
  if (warm) out.best = sub.best;
  for (const auto& r : results) {
    out.all_converged = out.all_converged && r.converged;
    if (r.objective < out.best.objective) out.best = r;
  }
  return out;
}

}  // namespace

HorizontalPath constructive_path(const SpacePoint& p, const SpacePoint& q,
                                 const FrameParams& fp) {
  return build_candidate(p, q, best_candidate(p, q, fp), fp);
}

UpperBound cc_upper(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp,
                    const OracleConfig& cfg) {
  if (cfg.segments < 1 || cfg.starts < 0) throw std::invalid_argument("invalid oracle config");
  UpperBound out;
  const Candidate direct = best_candidate(p, q, fp);
  out.constructive_value = direct.length;
  out.value = direct.length;
  out.witness = build_candidate(p, q, direct, fp);
  if (direct.length > 0.0 && std::fabs(q.x - p.x) < direct.length) {
    const LevelResult level = run_level(p, q, fp, cfg, cfg.segments, direct.length);
    out.converged = level.all_converged;
    if (level.best.objective < direct.length) {
      const Controls& c = level.best.controls;
      HorizontalPath path;
      path.start = p;
      for (std::size_t i = 0; i < c.theta.size(); ++i) {
        if (c.time[i] > 0.0) {
          path.segments.emplace_back(std::cos(c.theta[i]), std::sin(c.theta[i]), c.time[i]);
        }
      }
      const SpacePoint mid = path.endpoint(fp);
      path.append(constructive_path(mid, q, fp));
      path.resolve(fp);
      out.value = level.best.objective;
      out.witness = std::move(path);
    }
  }
  out.endpoint_error = relative_error(out.witness.endpoint(fp), q);
  out.certified = out.endpoint_error <= cfg.tol * (1.0 + out.value);
  return out;
}

DistanceBracket cc_bracket(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp,
                           const OracleConfig& cfg) {
  DistanceBracket b;
  b.lower = cc_lower(p, q, fp);
  UpperBound up = cc_upper(p, q, fp, cfg);
  b.upper = up.value;
  b.witness = std::move(up.witness);
  b.certified = up.certified;
  return b;
}

double equivalence_band(const FrameParams& fp) {
  (void)fp;
  return 5.0;
}

RatioSummary summarize(std::vector<double> values) {
  RatioSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.q05 = quantile(0.05);
  s.median = quantile(0.5);
  s.q95 = quantile(0.95);
  s.max = values.back();
  return s;
}

std::vector<std::pair<SpacePoint, SpacePoint>> sample_pairs(int n, std::uint64_t seed) {
  Rng rng(seed, 0xA0D17);
  auto coord = [&] {
    const double mag = std::pow(10.0, rng.uniform(-2.0, 2.0));
    return rng.coin() ? -mag : mag;
  };
  std::vector<std::pair<SpacePoint, SpacePoint>> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i) {
    SpacePoint p{coord(), coord(), coord()};
    SpacePoint q{coord(), coord(), coord()};
    pairs.emplace_back(p, q);
  }
  return pairs;
}

EquivalenceReport equivalence_audit(const FrameParams& fp,
                                    const std::vector<std::pair<SpacePoint, SpacePoint>>& pairs,
                                    const OracleConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("equivalence_audit needs at least one pair");
  EquivalenceReport rep;
  rep.alpha = fp.alpha();
  rep.n_pairs = static_cast<int>(pairs.size());
  rep.seed = cfg.seed;
  rep.band = equivalence_band(fp);
  std::vector<DistanceBracket> brackets(pairs.size());
  OracleConfig inner = cfg;
  inner.threads = 1;
  parallel_for(
      pairs.size(),
      [&](std::size_t i) { brackets[i] = cc_bracket(pairs[i].first, pairs[i].second, fp, inner); },
      cfg.threads);
  std::vector<double> up, low, inv;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& b = brackets[i];
    if (b.lower > b.upper) ++rep.sandwich_violations;
    if (!b.certified) ++rep.uncertified;
    const double d = delta(pairs[i].first, pairs[i].second, fp).total;
    if (d == 0.0) continue;
    up.push_back(b.upper / d);
    low.push_back(b.lower / d);
    inv.push_back(b.lower > 0.0 ? d / b.lower : std::numeric_limits<double>::infinity());
    const double k = rep.band;
    if (up.back() > k || up.back() < 1.0 / k || low.back() > k || inv.back() > k) {
      ++rep.band_violations;
    }
  }
  rep.upper_over_delta = summarize(up);
  rep.lower_over_delta = summarize(low);
  rep.delta_over_lower = summarize(inv);
  rep.passed = rep.sandwich_violations == 0 && rep.band_violations == 0 && rep.uncertified == 0;
  return rep;
}

EquivalenceReport equivalence_audit(const FrameParams& fp, int n_pairs, std::uint64_t seed,
                                    const OracleConfig& cfg) {
  if (n_pairs < 1) throw std::invalid_argument("equivalence_audit needs n_pairs >= 1");
  OracleConfig c = cfg;
  c.seed = seed;
  EquivalenceReport rep = equivalence_audit(fp, sample_pairs(n_pairs, seed), c);
  rep.seed = seed;
  return rep;
}

}  // namespace martinet
