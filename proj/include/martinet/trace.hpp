#pragma once

// Both sides of the boundary trace inequality for the frame X1, X2:
//   lhs = int int |f(u,0) - f(v,0)|^p / (delta(u,v)^(p-1) A(u, delta(u,v))) dmu(u) dmu(v)
//   rhs = int_{z >= 0} |Xf|^p dx dy dz
// with delta = delta_plane, A = ahlfors_surrogate and dmu = |x|^alpha dx dy.

#include <cstdint>
#include <string>
#include <vector>

#include "martinet/chains.hpp"
#include "martinet/core.hpp"
#include "martinet/fields.hpp"
#include "martinet/geometry.hpp"

namespace martinet {

struct QuadConfig {
  double truncation = 6.0;  // box half-widths in units of the support hint
  int order = 8;
  int min_panels = 4;
  int max_panels = 32;
  double rel_tol = 1e-5;
};

struct EnergyEstimate {
  double value = 0.0;
  double error = 0.0;  // |I(n) - I(n/2)| at the last refinement
  int panels = 0;
  bool converged = false;
};

/// Composite Gauss-Legendre tensor quadrature of |Xf|^p over the truncation
/// box (the support box itself for compact fields), doubling panels per axis
/// until two refinements agree to rel_tol.
EnergyEstimate sobolev_energy(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                              const QuadConfig& cfg = {});

struct BesovSample {
  SurfacePoint u;
  SurfacePoint v;
  double delta = 0.0;
  double contribution = 0.0;  // weighted integrand, zero below the cutoff
};

struct McConfig {
  std::int64_t samples = 200000;
  std::uint64_t seed = 1;
  double truncation = 6.0;      // boundary box half-width in units of the support hint
  double cutoff = 1e-3;         // delta_min in units of the box half-width L
  int cutoff_halvings = 3;
  double far_reach = 1e4;       // largest offset, in units of L
  bool reflect = false;         // map every sample through x -> -x
  std::vector<BesovSample>* dump = nullptr;
};

struct CutoffStep {
  double delta_min = 0.0;
  MeasureEstimate estimate;
};

struct DecadeContribution {
  int decade = 0;  // floor(log10(delta / L))
  double value = 0.0;
};

struct BesovEstimate {
  MeasureEstimate estimate;  // at the base cutoff
  std::vector<CutoffStep> cutoff_study;
  bool cutoff_converged = false;
  std::vector<DecadeContribution> decades;
};

BesovEstimate besov_seminorm(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                             const McConfig& cfg = {});

struct TraceConfig {
  McConfig mc;
  QuadConfig quad;
};

struct TraceReport {
  std::string function;
  double alpha = 0.0;
  double p = 0.0;
  BesovEstimate lhs;
  EnergyEstimate rhs;
  double ratio = 0.0;
  double ratio_half_width = 0.0;
  bool degenerate = false;  // lhs = rhs = 0
  std::string status;       // ok | inconclusive
  TraceConfig config;
};

/// Throws std::domain_error when rhs = 0 but lhs > 0.
TraceReport trace_ratio(const ScalarField& f, const FrameParams& fp, const BesovParams& bp,
                        const TraceConfig& cfg = {});

struct PointwiseBound {
  double difference = 0.0;  // |f(u,0) - f(v,0)|
  double bound = 0.0;       // sum of gradient line integrals along the chains
  int n_chains = 0;
};

PointwiseBound pointwise_bound(const ScalarField& f, const SurfacePoint& u, const SurfacePoint& v,
                               const FrameParams& fp, const ChainConfig& cfg = ChainConfig{});

}  // namespace martinet
