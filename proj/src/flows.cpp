#include "martinet/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "martinet/numerics.hpp"

namespace martinet {

ControlSegment::ControlSegment(double e1, double e2, double duration)
    : e1_(duration < 0.0 ? -e1 : e1),
      e2_(duration < 0.0 ? -e2 : e2),
      duration_(std::fabs(duration)),
      sup_speed_(std::max(std::fabs(e1), std::fabs(e2))),
      euclid_speed_(std::hypot(e1, e2)) {}

SpacePoint flow_partial(const SpacePoint& p, const ControlSegment& seg, double t,
                        const FrameParams& fp) {
  const double x_end = p.x + seg.e1() * t;
  double rise = 0.0;
  if (seg.e2() != 0.0 && t != 0.0) {
    if (seg.e1() == 0.0) {
      rise = seg.e2() * t * fp.abs_pow(p.x);
    } else {
      rise = seg.e2() * fp.integral_step(p.x, seg.e1() * t) / seg.e1();
    }
  }
  return {x_end, p.y + seg.e2() * t, p.z + rise};
}

SpacePoint flow(const SpacePoint& p, const ControlSegment& seg, const FrameParams& fp) {
  return flow_partial(p, seg, seg.duration(), fp);
}

void HorizontalPath::resolve(const FrameParams& fp) {
  samples.clear();
  samples.reserve(segments.size());
  SpacePoint cur = start;
  for (const auto& seg : segments) {
    cur = flow(cur, seg, fp);
    samples.push_back(cur);
  }
}

SpacePoint HorizontalPath::endpoint(const FrameParams& fp) const {
  SpacePoint cur = start;
  for (const auto& seg : segments) cur = flow(cur, seg, fp);
  return cur;
}

std::vector<PathSample> HorizontalPath::sample(const FrameParams& fp, int per_segment) const {
  per_segment = std::max(per_segment, 1);
  std::vector<PathSample> out;
  out.push_back({0.0, start});
  SpacePoint cur = start;
  double t0 = 0.0;
  for (const auto& seg : segments) {
    for (int k = 1; k <= per_segment; ++k) {
      const double t = seg.duration() * k / per_segment;
      out.push_back({t0 + t, flow_partial(cur, seg, t, fp)});
    }
    cur = flow(cur, seg, fp);
    t0 += seg.duration();
  }
  return out;
}

void HorizontalPath::append(const HorizontalPath& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

PathLength path_length(const HorizontalPath& path) {
  PathLength len;
  for (const auto& seg : path.segments) {
    len.sup_norm += seg.duration() * seg.sup_speed();
    len.euclid_norm += seg.duration() * seg.euclid_speed();
  }
  return len;
}

HorizontalPath lift(const std::vector<std::pair<double, double>>& polyline, double z0,
                    const FrameParams& fp) {
  HorizontalPath path;
  if (polyline.empty()) return path;
  path.start = {polyline.front().first, polyline.front().second, z0};
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const double dx = polyline[i].first - polyline[i - 1].first;
    const double dy = polyline[i].second - polyline[i - 1].second;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    path.segments.emplace_back(dx / len, dy / len, len);
  }
  path.resolve(fp);
  return path;
}

double square_loop_z(double x, double u, const FrameParams& fp) {
  if (!(x >= 0.0) || !(u > 0.0)) throw std::invalid_argument("square_loop_z needs x >= 0, u > 0");
  return u * (fp.abs_pow(x + u) - fp.abs_pow(x));
}

HorizontalPath square_loop_path(const SpacePoint& from, double u, bool raise,
                                const FrameParams& fp) {
  const double out = from.x < 0.0 ? -1.0 : 1.0;
  const double up = raise ? 1.0 : -1.0;
  HorizontalPath loop;
  loop.start = from;
  loop.segments = {ControlSegment(out, 0.0, u), ControlSegment(0.0, up, u),
                   ControlSegment(-out, 0.0, u), ControlSegment(0.0, -up, u)};
  loop.resolve(fp);
  return loop;
}

double square_loop_side(double x, double dz, const FrameParams& fp) {
  const double target = std::fabs(dz);
  if (target == 0.0) return 0.0;
  const double a = std::fabs(x);
  const double alpha = fp.alpha();
  const double base = fp.abs_pow(a);
  // g(u) = u((a+u)^alpha - a^alpha) is increasing and convex on u >= 0, so
  // Newton started to the right of the root decreases monotonically onto it.
  auto g = [&](double u) { return u * (fp.abs_pow(a + u) - base) - target; };
  auto dg = [&](double u) {
    return fp.abs_pow(a + u) - base + alpha * u * pow_abs(a + u, alpha - 1.0);
  };
  double u = pow_abs(target, 1.0 / (alpha + 1.0));
  if (a > 0.0) u = std::min(u, std::sqrt(target / (alpha * pow_abs(a, alpha - 1.0))));
  u = std::max(u, 1e-300);
  for (int i = 0; i < 2100 && g(u) < 0.0; ++i) u *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double gu = g(u);
    if (gu <= 0.0) break;
    const double next = u - gu / dg(u);
    if (!(next < u) || next <= 0.0) break;
    u = next;
  }
  return u;
}

}  // namespace martinet
