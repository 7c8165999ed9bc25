#pragma once

// Scalar numerics shared by the modules: a bracketing root finder, 1-D
// quadrature rules, seeded random streams and a deterministic parallel loop.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace martinet {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Root of an increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Bisection safeguarding an Illinois-modified secant step; iterates until the
/// bracket collapses to adjacent doubles or |f| <= abs_tol.
RootResult solve_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double abs_tol = 0.0, int max_iter = 3000);

/// Expands hi by doubling until f(hi) >= 0, then calls solve_increasing.
RootResult solve_increasing_from_zero(const std::function<double(double)>& f, double hi_guess,
                                      double abs_tol = 0.0);

/// Adaptive Simpson with Richardson correction. The target error is
/// max(rel_tol * |coarse estimate|, abs_tol).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 40, double abs_tol = 0.0);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre on [a, b] with equal panels.
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels,
                       int order = 8);

/// SplitMix64-derived stream; portable and identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// Worker count: explicit value if > 0, else MARTINET_THREADS, else hardware.
unsigned resolve_threads(unsigned requested = 0);
void set_default_threads(unsigned n);

/// Runs body(i) for i in [0, n); results must be written into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

struct MeanStat {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half width
  std::size_t n = 0;
};

/// Mean and 95% CI of a sample, summed in index order.
MeanStat mean_ci(std::span<const double> values);

}  // namespace martinet
