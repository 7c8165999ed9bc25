#pragma once

#include <utility>
#include <vector>

#include "martinet/core.hpp"

namespace martinet {

/// Constant control (e1, e2) held for `duration`: the curve solves
/// gamma' = e1 X1(gamma) + e2 X2(gamma). Negative durations are stored as
/// positive durations with negated controls.
class ControlSegment {
 public:
  ControlSegment() = default;
  ControlSegment(double e1, double e2, double duration);

  double e1() const { return e1_; }
  double e2() const { return e2_; }
  double duration() const { return duration_; }
  double sup_speed() const { return sup_speed_; }
  double euclid_speed() const { return euclid_speed_; }

 private:
  double e1_ = 0.0;
  double e2_ = 0.0;
  double duration_ = 0.0;
  double sup_speed_ = 0.0;
  double euclid_speed_ = 0.0;
};

/// Exact endpoint of the flow of e1 X1 + e2 X2 for the segment's duration.
SpacePoint flow(const SpacePoint& p, const ControlSegment& seg, const FrameParams& fp);

/// Same, stopped at time t in [0, duration].
SpacePoint flow_partial(const SpacePoint& p, const ControlSegment& seg, double t,
                        const FrameParams& fp);

struct PathSample {
  double t = 0.0;
  SpacePoint point;
};

struct HorizontalPath {
  SpacePoint start;
  std::vector<ControlSegment> segments;
  std::vector<SpacePoint> samples;  // resolved waypoints, one per segment end

  /// Replays the segments and fills `samples`.
  void resolve(const FrameParams& fp);
  SpacePoint endpoint(const FrameParams& fp) const;
  /// Dense samples, `per_segment` intervals per segment, cumulative time t.
  std::vector<PathSample> sample(const FrameParams& fp, int per_segment) const;
  /// Appends other's segments; other must start where this path ends.
  void append(const HorizontalPath& other);
};

struct PathLength {
  double sup_norm = 0.0;
  double euclid_norm = 0.0;
};

PathLength path_length(const HorizontalPath& path);

/// Horizontal lift of a planar polyline traversed edge by edge at unit
/// Euclidean speed, starting at height z0.
HorizontalPath lift(const std::vector<std::pair<double, double>>& polyline, double z0,
                    const FrameParams& fp);

/// Height gained by lifting the unit-speed square loop
/// (x,0) -> (x+u,0) -> (x+u,u) -> (x,u) -> (x,0): u((x+u)^alpha - x^alpha).
double square_loop_z(double x, double u, const FrameParams& fp);

/// Square loop of side u based at `from`, opening away from the line x = 0
/// and oriented so that the height changes by sign(dz_sign) *
/// u((|x|+u)^alpha - |x|^alpha).
HorizontalPath square_loop_path(const SpacePoint& from, double u, bool raise,
                                const FrameParams& fp);

/// Side of the square loop at |x| that raises or lowers height by |dz|.
double square_loop_side(double x, double dz, const FrameParams& fp);

}  // namespace martinet
