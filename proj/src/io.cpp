#include "martinet/io.hpp"

#include <charconv>
#include <string>

namespace martinet {

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Json to_json(const SpacePoint& p) { return Json::array({p.x, p.y, p.z}); }

Json to_json(const SurfacePoint& p) { return Json::array({p.x, p.y}); }

Json to_json(const DeltaBreakdown& d) {
  return {{"dx", d.dx}, {"dy", d.dy}, {"zeta", d.zeta}, {"vertical", d.vertical},
          {"total", d.total}};
}

Json to_json(const MeasureEstimate& m) {
  return {{"value", m.value}, {"half_width", m.half_width}, {"n_samples", m.n_samples},
          {"seed", m.seed}};
}

Json to_json(const HorizontalPath& path) {
  Json segs = Json::array();
  for (const auto& s : path.segments) {
    segs.push_back({{"e1", s.e1()}, {"e2", s.e2()}, {"duration", s.duration()}});
  }
  Json pts = Json::array();
  for (const auto& p : path.samples) pts.push_back(to_json(p));
  return {{"start", to_json(path.start)}, {"segments", segs}, {"waypoints", pts}};
}

Json to_json(const DistanceBracket& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"certified", b.certified},
          {"witness", to_json(b.witness)}};
}

Json to_json(const ChainSpec& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  Json gens = Json::array();
  Json durs = Json::array();
  for (const auto& s : c.segments) {
    gens.push_back(to_string(s.generator));
    durs.push_back(s.duration);
  }
  return {{"case", to_string(c.case_label)},
          {"reflected", c.reflected},
          {"points", pts},
          {"generators", gens},
          {"durations", durs},
          {"sigma", c.sigma},
          {"tau", c.tau},
          {"z_prime", c.z_prime}};
}

Json to_json(const ChainAudit& a) {
  return {{"case", to_string(a.case_label)},
          {"n_chains", a.n_chains},
          {"endpoint_err", a.endpoint_err},
          {"max_z_violation", a.max_z_violation},
          {"length", a.length},
          {"length_over_delta", a.length_over_delta}};
}

Json to_json(const Normalization& n) {
  Json pairs = Json::array();
  for (const auto& p : n.pairs) pairs.push_back({to_json(p.from), to_json(p.to)});
  Json out = {{"reflected", n.reflected}, {"pairs", pairs}, {"log", n.log}};
  if (n.has_third_point) out["third_point"] = to_json(n.third_point);
  return out;
}

Json to_json(const AhlforsReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"x", row.x},
                    {"r", row.r},
                    {"mu", to_json(row.mu)},
                    {"vol", to_json(row.vol)},
                    {"surrogate", row.surrogate},
                    {"ratio_perimeter", row.ratio_perimeter},
                    {"ratio_surrogate", row.ratio_surrogate},
                    {"ci_perimeter", row.ci_perimeter},
                    {"status", row.status}});
  }
  return {{"alpha", r.alpha},
          {"bands",
           {{"perimeter", {r.bands.perimeter_lo, r.bands.perimeter_hi}},
            {"surrogate", {r.bands.surrogate_lo, r.bands.surrogate_hi}}}},
          {"violations", r.violations},
          {"inconclusive", r.inconclusive},
          {"status", r.status},
          {"rows", rows}};
}

Json to_json(const BallBoxAudit& a) {
  return {{"alpha", a.alpha}, {"n_triples", a.n_triples}, {"seed", a.seed},
          {"inside", a.inside}, {"disagreements", a.disagreements}};
}

Json to_json(const RatioSummary& s) {
  return {{"min", s.min}, {"q05", s.q05}, {"median", s.median}, {"q95", s.q95}, {"max", s.max}};
}

Json to_json(const EquivalenceReport& r) {
  return {{"alpha", r.alpha},
          {"n_pairs", r.n_pairs},
          {"seed", r.seed},
          {"band", r.band},
          {"upper_over_delta", to_json(r.upper_over_delta)},
          {"lower_over_delta", to_json(r.lower_over_delta)},
          {"delta_over_lower", to_json(r.delta_over_lower)},
          {"sandwich_violations", r.sandwich_violations},
          {"band_violations", r.band_violations},
          {"uncertified", r.uncertified},
          {"passed", r.passed}};
}

Json to_json(const MonotonicityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"eps0", row.eps0}, {"sigma0", row.sigma0}, {"time_defect", row.time_defect}});
  }
  return {{"alpha", r.alpha}, {"decreasing", r.decreasing}, {"rows", rows}};
}

Json to_json(const EnergyEstimate& e) {
  return {{"value", e.value}, {"error", e.error}, {"panels", e.panels},
          {"converged", e.converged}};
}

Json to_json(const BesovEstimate& b) {
  Json study = Json::array();
  for (const auto& s : b.cutoff_study) {
    study.push_back({{"delta_min", s.delta_min}, {"estimate", to_json(s.estimate)}});
  }
  Json decades = Json::array();
  for (const auto& d : b.decades) decades.push_back({{"decade", d.decade}, {"value", d.value}});
  return {{"estimate", to_json(b.estimate)},
          {"cutoff_converged", b.cutoff_converged},
          {"cutoff_study", study},
          {"decades", decades}};
}

Json to_json(const TraceReport& r) {
  const McConfig& mc = r.config.mc;
  const QuadConfig& q = r.config.quad;
  return {{"function", r.function},
          {"alpha", r.alpha},
          {"p", r.p},
          {"lhs", to_json(r.lhs)},
          {"rhs", to_json(r.rhs)},
          {"ratio", r.ratio},
          {"ratio_half_width", r.ratio_half_width},
          {"degenerate", r.degenerate},
          {"status", r.status},
          {"mc",
           {{"samples", mc.samples},
            {"seed", mc.seed},
            {"truncation", mc.truncation},
            {"cutoff", mc.cutoff},
            {"cutoff_halvings", mc.cutoff_halvings},
            {"far_reach", mc.far_reach},
            {"reflect", mc.reflect}}},
          {"quadrature",
           {{"truncation", q.truncation},
            {"order", q.order},
            {"min_panels", q.min_panels},
            {"max_panels", q.max_panels},
            {"rel_tol", q.rel_tol}}}};
}

void write_path_csv(std::ostream& os, const std::vector<PathSample>& samples) {
  os << "t,x,y,z\n";
  for (const auto& s : samples) {
    os << num(s.t) << ',' << num(s.point.x) << ',' << num(s.point.y) << ',' << num(s.point.z)
       << '\n';
  }
}

void write_chain_csv(std::ostream& os, const std::vector<ChainSpec>& chains) {
  os << "chain,index,generator,duration,x,y,z\n";
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const ChainSpec& c = chains[k];
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const SpacePoint& p = c.points[i];
      os << k << ',' << i << ',';
      if (i > 0 && i - 1 < c.segments.size()) {
        os << to_string(c.segments[i - 1].generator) << ',' << num(c.segments[i - 1].duration);
      } else {
        os << ',';
      }
      os << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << '\n';
    }
  }
}

void write_ahlfors_csv(std::ostream& os, const AhlforsReport& r) {
  os << "x,r,mu,mu_hw,vol,vol_hw,surrogate,ratio_perimeter,ratio_surrogate,status\n";
  for (const auto& row : r.rows) {
    os << num(row.x) << ',' << num(row.r) << ',' << num(row.mu.value) << ','
       << num(row.mu.half_width) << ',' << num(row.vol.value) << ',' << num(row.vol.half_width)
       << ',' << num(row.surrogate) << ',' << num(row.ratio_perimeter) << ','
       << num(row.ratio_surrogate) << ',' << row.status << '\n';
  }
}

void write_besov_samples_csv(std::ostream& os, const std::vector<BesovSample>& samples) {
  os << "ux,uy,vx,vy,delta,contribution\n";
  for (const auto& s : samples) {
    os << num(s.u.x) << ',' << num(s.u.y) << ',' << num(s.v.x) << ',' << num(s.v.y) << ','
       << num(s.delta) << ',' << num(s.contribution) << '\n';
  }
}

}  // namespace martinet
