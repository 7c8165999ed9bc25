#include "martinet/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace martinet {

RootResult solve_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double abs_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw std::domain_error("solve_increasing: root not bracketed");
  RootResult out;
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  int side = 0;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    // Illinois step, kept only if it lands well inside the bracket.
    const double secant = lo - flo * (hi - lo) / (fhi - flo);
    const double width = hi - lo;
    double trial = secant;
    if (!(trial > lo + 0.01 * width && trial < hi - 0.01 * width) || it % 4 == 0) trial = mid;
    const double ft = f(trial);
    if (ft == 0.0) return {trial, 0.0, it};
    if (std::fabs(ft) <= abs_tol) {
      out.root = trial;
      out.residual = ft;
      return out;
    }
    if (ft < 0.0) {
      lo = trial;
      flo = ft;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = trial;
      fhi = ft;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  // flo/fhi may carry Illinois scaling; re-evaluate to pick the better end.
  const double a = f(lo);
  const double b = f(hi);
  if (std::fabs(a) <= std::fabs(b)) return {lo, a, out.iterations};
  return {hi, b, out.iterations};
}

RootResult solve_increasing_from_zero(const std::function<double(double)>& f, double hi_guess,
                                      double abs_tol) {
  double hi = hi_guess > 0.0 && std::isfinite(hi_guess) ? hi_guess : 1.0;
  for (int i = 0; i < 2100 && f(hi) < 0.0; ++i) hi *= 2.0;
  return solve_increasing(f, 0.0, hi, abs_tol);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

constexpr int kMaxGaussOrder = 32;

std::atomic<unsigned> g_default_threads{0};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth, double abs_tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Seed the tolerance from a coarse composite estimate so that relative
  // accuracy is meaningful even when the integral is small.
  const double coarse = std::fabs(composite_gauss(f, a, b, 4, 8));
  const double tol = std::max(rel_tol * coarse, std::max(abs_tol, 1e-300));
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

const GaussRule& gauss_legendre(int order) {
  static const std::array<GaussRule, kMaxGaussOrder + 1> rules = [] {
    std::array<GaussRule, kMaxGaussOrder + 1> r;
    for (int n = 1; n <= kMaxGaussOrder; ++n) r[n] = make_rule(n);
    return r;
  }();
  if (order < 1 || order > kMaxGaussOrder) throw std::invalid_argument("unsupported Gauss order");
  return rules[order];
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels,
                       int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double mid = lo + 0.5 * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    sum += 0.5 * h * panel;
  }
  return sum;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : state_(seed) {
  // Decorrelate streams by hashing the stream id into the state.
  state_ ^= 0xD1B54A32D192ED03ull * (stream + 1);
  next();
}

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = uniform_open0();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void set_default_threads(unsigned n) { g_default_threads = n; }

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const unsigned d = g_default_threads.load(); d > 0) return d;
  if (const char* env = std::getenv("MARTINET_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

MeanStat mean_ci(std::span<const double> values) {
  MeanStat s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double var = ss / static_cast<double>(s.n - 1);
  s.half_width = 1.96 * std::sqrt(var / static_cast<double>(s.n));
  return s;
}

}  // namespace martinet
