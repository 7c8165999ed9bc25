#pragma once

// Ball-box structure of the quasi-distance and the boundary measure
// mu = |x|^alpha dx dy on the plane z = 0.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "martinet/core.hpp"

namespace martinet {

enum class BoxVariant { Tilted = 1, Flat = 2 };

/// B1(p, r): image of {max(|u1|, |u2|, |u3|^(1/2)) < r} under Phi1 (needs p.x != 0).
/// B2(p, r): image of {max(|u1|, |u2|, |u3|^(1/(alpha+1))) < r} under Phi2.
struct BoxSpec {
  BoxSpec(BoxVariant v, const SpacePoint& c, double radius);
  BoxVariant variant;
  SpacePoint center;
  double r;
};

struct MeasureEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% confidence half width
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

using Coords = std::array<double, 3>;

SpacePoint phi(BoxVariant variant, const SpacePoint& p, const Coords& u, const FrameParams& fp);

/// Inverse of phi: (x'-x, y'-y, -zeta/|x|^(alpha-1)) or (x'-x, y'-y, -zeta).
Coords phi_inverse(BoxVariant variant, const SpacePoint& p, const SpacePoint& q,
                   const FrameParams& fp);

bool box_contains(const SpacePoint& q, const BoxSpec& box, const FrameParams& fp);

/// max{|x'-x|, |y'-y|, vertical}: q lies in B1(p,r) u B2(p,r) iff this is < r.
double delta_max_form(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp);

/// 8 r^4 |x|^(alpha-1) for B1, 8 r^(alpha+3) for B2.
double box_volume(const BoxSpec& box, const FrameParams& fp);

/// Hit-or-miss Lebesgue volume of {q : predicate(q)} inside the sheared
/// envelope |u1|, |u2| < r, |zeta| < max(r^(alpha+1), r^2 |x|^(alpha-1)).
MeasureEstimate envelope_volume_mc(const SpacePoint& p, double r, const FrameParams& fp,
                                   std::int64_t n, std::uint64_t seed,
                                   const std::function<bool(const SpacePoint&)>& inside);

/// Volume of the quasi-distance ball {q : delta(p, q) < r}.
MeasureEstimate ball_volume_mc(const SpacePoint& p, double r, const FrameParams& fp,
                               std::int64_t n, std::uint64_t seed);

/// Exact mu of the planar section of a box centred on z = 0.
double mu_box_section(const BoxSpec& box, const FrameParams& fp);

/// Stratified estimate of int |x'|^alpha over {v in R^2 : inside(v)} inside
/// the rectangle [x-r, x+r] x [y-h, y+h].
MeasureEstimate planar_mu_mc(const SurfacePoint& u, double r, double half_height,
                             const FrameParams& fp, std::int64_t n, std::uint64_t seed,
                             const std::function<bool(const SurfacePoint&)>& inside);

/// mu of the planar section of the quasi-distance ball centred at u.
MeasureEstimate mu_ball_mc(const SurfacePoint& u, double r, const FrameParams& fp,
                           std::int64_t n, std::uint64_t seed);

/// r^3 |x|^(alpha-1) if |x| >= r, r^(alpha+2) otherwise.
double ahlfors_surrogate(const SurfacePoint& u, double r, const FrameParams& fp);

struct AhlforsGrid {
  std::vector<double> radii;    // default: 0.1 .. 10 log-spaced
  std::vector<double> centers;  // x coordinates of the centers, y = 0
  static AhlforsGrid standard();
};

struct AhlforsMcConfig {
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  double max_relative_ci = 0.1;  // wider CIs make a row inconclusive
};

struct AhlforsRow {
  double x = 0.0;
  double r = 0.0;
  MeasureEstimate mu;
  MeasureEstimate vol;
  double surrogate = 0.0;
  double ratio_perimeter = 0.0;  // mu * r / vol
  double ratio_surrogate = 0.0;  // mu / surrogate
  double ci_perimeter = 0.0;     // propagated relative half width of ratio_perimeter
  std::string status;            // ok | violation | inconclusive
};

struct AhlforsBands {
  double perimeter_lo, perimeter_hi;
  double surrogate_lo, surrogate_hi;
};

/// Frozen bands for the audit ratios at the given alpha.
AhlforsBands ahlfors_bands(const FrameParams& fp);

struct AhlforsReport {
  double alpha = 0.0;
  AhlforsBands bands{};
  std::vector<AhlforsRow> rows;
  int violations = 0;
  int inconclusive = 0;
  std::string status;  // ok | violation | inconclusive
};

AhlforsReport ahlfors_audit(const FrameParams& fp, const AhlforsGrid& grid,
                            const AhlforsMcConfig& mc);

struct BallBoxAudit {
  double alpha = 0.0;
  int n_triples = 0;
  std::uint64_t seed = 0;
  int inside = 0;         // triples with q in B1 u B2
  int disagreements = 0;  // box union vs max-form predicate
};

/// Random (p, q, r) with q drawn in the sheared envelope around p, so both
/// outcomes of the membership test occur.
BallBoxAudit ballbox_audit(const FrameParams& fp, int n_triples, std::uint64_t seed);

}  // namespace martinet
