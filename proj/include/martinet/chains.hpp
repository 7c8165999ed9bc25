#pragma once

// Explicit horizontal chains joining two points of the boundary plane z = 0,
// built from flows of +-X1, +-X2 and +-Z with Z = X1 + X2.

#include <string>
#include <vector>

#include "martinet/core.hpp"
#include "martinet/fields.hpp"
#include "martinet/flows.hpp"
#include "martinet/numerics.hpp"

namespace martinet {

enum class CaseLabel { Characteristic, Noncharacteristic, Mixed };

const char* to_string(CaseLabel c);

struct ChainConfig {
  explicit ChainConfig(double eps0_value = 0.1, double root_tol_value = 1e-12);
  double eps0;
  double root_tol;
};

enum class Generator { PlusX1, MinusX1, PlusX2, MinusX2, PlusZ, MinusZ };

const char* to_string(Generator g);

struct ChainSegment {
  Generator generator;
  double duration;
  ControlSegment control() const;
};

/// Chain u0 -> ... -> un in the normalized frame. When `reflected` is set the
/// chain joins the mirror images (x -> -x) of its points; path() undoes it.
struct ChainSpec {
  CaseLabel case_label = CaseLabel::Characteristic;
  std::vector<SpacePoint> points;
  std::vector<ChainSegment> segments;
  double sigma = 0.0;
  double tau = 0.0;
  double z_prime = 0.0;
  bool reflected = false;

  /// The chain in original coordinates.
  HorizontalPath path() const;
  SurfacePoint from() const;
  SurfacePoint to() const;
};

/// Trichotomy with d = delta_plane(u, v): characteristic when d >= eps0 |x|
/// and d >= eps0 |x'|, noncharacteristic when both fail, mixed otherwise.
/// Mixed pairs are handled by the noncharacteristic construction.
CaseLabel classify(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                   const ChainConfig& cfg);

enum class ChainKind { Characteristic, Noncharacteristic };

struct NormalizedPair {
  SurfacePoint from;
  SurfacePoint to;
};

struct Normalization {
  std::vector<NormalizedPair> pairs;  // in the (possibly reflected) frame
  bool reflected = false;
  bool has_third_point = false;
  SurfacePoint third_point;  // in the normalized frame
  std::vector<std::string> log;
};

/// Orders the pair so y <= y', reflects so x' >= 0 and, when the chain's
/// orientation condition still fails, inserts the third point
/// (2x - x', 2y' - y) or (-x, 2y' - y) and returns the two pairs that reach it.
/// Throws std::domain_error when the noncharacteristic chain cannot be used.
Normalization normalize(const SurfacePoint& u, const SurfacePoint& v, ChainKind kind);

/// Requires y <= y' and |x| <= x' (x' > 0 unless x = x' = 0).
ChainSpec char_chain(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp);

/// z' = (y'-y+x-x') x^alpha - (x^(alpha+1) - x'^(alpha+1))/(alpha+1).
double nonchar_z_prime(double x, double x_prime, double dy, const FrameParams& fp);

/// Unique tau >= 0 with tau((x'+tau)^alpha - x'^alpha) = z'. Requires x >= x' >= 0, dy >= 0.
double tau_nonchar(double x, double x_prime, double dy, const FrameParams& fp,
                   const ChainConfig& cfg);

/// Root of tau((x'+tau)^alpha - x'^alpha) = target for target >= 0.
RootResult solve_tau(double x_prime, double target, const FrameParams& fp);

/// Requires y <= y' and x >= x' >= 0.
ChainSpec nonchar_chain(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                        const ChainConfig& cfg);

/// The chains the trace estimate uses for (u, v): classified, normalized and
/// built, falling back to the characteristic construction when the
/// noncharacteristic one does not apply.
std::vector<ChainSpec> chains_for_pair(const SurfacePoint& u, const SurfacePoint& v,
                                       const FrameParams& fp, const ChainConfig& cfg);

struct ChainAudit {
  CaseLabel case_label = CaseLabel::Characteristic;
  int n_chains = 0;
  double endpoint_err = 0.0;
  double max_z_violation = 0.0;
  double length = 0.0;  // sum of durations (unit sup-norm speed)
  double length_over_delta = 0.0;
};

/// Largest relative mismatch between the stored points and a replay of the
/// segments through the flows, including the final target.
double replay_error(const ChainSpec& chain, const FrameParams& fp);

/// Most negative height on dense samples of the chain (0 when none). The
/// first half of the segments is replayed forward from the start, the rest
/// backward from the target on z = 0, so heights near either end do not
/// inherit rounding from the top of the chain. Closure is replay_error's job.
double min_height(const ChainSpec& chain, const FrameParams& fp, int per_segment = 32);

ChainAudit chain_audit(const SurfacePoint& u, const SurfacePoint& v, const FrameParams& fp,
                       const ChainConfig& cfg);

/// sum over segments of int_0^T |e| |Xf(gamma(t))| dt; |e| = 1 except for
/// Z segments. Bounds |f(end) - f(start)|.
double gradient_line_integral(const ScalarField& f, const ChainSpec& chain, const FrameParams& fp);

/// Frozen bound on chain length / delta_plane for admissible pairs.
double chain_length_band(const FrameParams& fp, ChainKind kind);

/// Random pair in the characteristic or noncharacteristic case.
std::pair<SurfacePoint, SurfacePoint> sample_case_pair(ChainKind kind, const FrameParams& fp,
                                                       const ChainConfig& cfg, Rng& rng);

/// z-hat(x', h) = h2^2 (x'+h1)^(alpha-1) + h1 (x'+h1)^alpha - ((x'+h1)^(alpha+1) - x'^(alpha+1))/(alpha+1).
double z_hat(double x_prime, double h1, double h2, const FrameParams& fp);
double tau_hat(double x_prime, double h1, double h2, const FrameParams& fp);

/// Central finite difference of x' -> x'^alpha tau_hat(x', h), divided by x'^alpha.
double tau_hat_sensitivity(double x_prime, double h1, double h2, const FrameParams& fp);

/// |phi'(t) + 1| for phi(t) = (s x^alpha + ((x-t)^(alpha+1) - x^(alpha+1))/(alpha+1)) / (x-t)^alpha,
/// s = h2^2/x + h1.
double time_change_defect(double x, double h1, double h2, double t, const FrameParams& fp);

struct MonotonicityRow {
  double eps0 = 0.0;
  double sigma0 = 0.0;      // max |d/dx'(x'^alpha tau_hat)| / x'^alpha
  double time_defect = 0.0; // max |phi' + 1|
};

struct MonotonicityReport {
  double alpha = 0.0;
  std::vector<MonotonicityRow> rows;
  bool decreasing = false;
};

struct MonotonicityGrid {
  std::vector<double> eps0 = {0.1, 0.05, 0.01};
  std::vector<double> multiples = {1.0, 1.5, 2.0, 3.0, 5.0, 10.0};  // x' = m |h| / eps0
  int angles = 8;                                                  // directions of h, |h| = 1
};

MonotonicityReport monotonicity_audits(const FrameParams& fp, const MonotonicityGrid& grid = {});

}  // namespace martinet
