#pragma once

// Numerical bracket for the Carnot-Caratheodory distance d(p, q), measured
// with unit Euclidean speed |(h1, h2)| <= 1.

#include <cstdint>
#include <vector>

#include "martinet/core.hpp"
#include "martinet/flows.hpp"

namespace martinet {

struct OracleConfig {
  int segments = 8;
  int starts = 16;
  std::uint64_t seed = 0;
  double tol = 1e-8;  // witness endpoint tolerance, relative
  int max_evals_per_start = 3000;
  unsigned threads = 0;
};

/// max{|x'-x|, |y'-y|, T*} where T* solves alpha (|x|+T)^(alpha-1) T^2 / 2 = |zeta|.
double cc_lower(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp);

/// Root T* of the vertical majorant for a given |zeta| and base |x|.
double vertical_time_bound(double abs_zeta, double abs_x, const FrameParams& fp);

/// Best of the explicit flow-plus-square-loop paths from p to q.
HorizontalPath constructive_path(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp);

struct UpperBound {
  double value = 0.0;               // Euclidean length of the witness
  double constructive_value = 0.0;  // best explicit path alone
  HorizontalPath witness;
  double endpoint_error = 0.0;  // relative_error(witness end, q)
  bool converged = true;        // every coordinate search reached its step floor
  bool certified = true;        // endpoint_error <= tol * (1 + value)
};

UpperBound cc_upper(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp,
                    const OracleConfig& cfg = {});

struct DistanceBracket {
  double lower = 0.0;
  double upper = 0.0;
  HorizontalPath witness;
  bool certified = true;
};

DistanceBracket cc_bracket(const SpacePoint& p, const SpacePoint& q, const FrameParams& fp,
                           const OracleConfig& cfg = {});

struct RatioSummary {
  double min = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

RatioSummary summarize(std::vector<double> values);

struct EquivalenceReport {
  double alpha = 0.0;
  int n_pairs = 0;
  std::uint64_t seed = 0;
  double band = 0.0;  // K
  RatioSummary upper_over_delta;
  RatioSummary lower_over_delta;
  RatioSummary delta_over_lower;
  int sandwich_violations = 0;  // lower > upper
  int band_violations = 0;
  int uncertified = 0;
  bool passed = false;
};

/// Equivalence band K used by the audit: every pair must satisfy
/// upper/delta <= K, delta/lower <= K, lower/delta <= K and upper/delta >= 1/K.
/// First-run frozen regression value: over 200 pairs per alpha in
/// {1, 1.5, 2, 3} (seed 7, 8 segments, 16 starts) the worst ratio was 3.8.
double equivalence_band(const FrameParams& fp);

/// Point pairs with coordinates log-uniform in [1e-2, 1e2] and random signs.
std::vector<std::pair<SpacePoint, SpacePoint>> sample_pairs(int n, std::uint64_t seed);

EquivalenceReport equivalence_audit(const FrameParams& fp, int n_pairs, std::uint64_t seed,
                                    const OracleConfig& cfg = {});

/// Same audit over a caller-supplied pair list.
EquivalenceReport equivalence_audit(const FrameParams& fp,
                                    const std::vector<std::pair<SpacePoint, SpacePoint>>& pairs,
                                    const OracleConfig& cfg = {});

}  // namespace martinet
