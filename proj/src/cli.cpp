#include "martinet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "martinet/chains.hpp"
#include "martinet/geometry.hpp"
#include "martinet/io.hpp"
#include "martinet/numerics.hpp"
#include "martinet/oracle.hpp"
#include "martinet/trace.hpp"

namespace martinet {

namespace {

const std::vector<std::string> kCommands = {"distance", "ball",  "mu",        "ahlfors",
                                            "ballbox-audit", "chain", "trace", "audit-all"};

std::vector<double> parse_coords(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(flag) + ": bad coordinate '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

SpacePoint space_point(const std::string& text, const char* flag) {
  const auto c = parse_coords(text, flag);
  if (c.size() != 3) throw std::invalid_argument(std::string(flag) + " needs x,y,z");
  return {c[0], c[1], c[2]};
}

SurfacePoint surface_point(const std::string& text, const char* flag) {
  const auto c = parse_coords(text, flag);
  if (c.size() == 3 && c[2] == 0.0) return {c[0], c[1]};
  if (c.size() != 2) throw std::invalid_argument(std::string(flag) + " needs x,y on z = 0");
  return {c[0], c[1]};
}

std::int64_t samples_or(const RunConfig& cfg, std::int64_t fallback) {
  return cfg.samples > 0 ? cfg.samples : fallback;
}

Json config_json(const RunConfig& c) {
  return {{"command", c.command},   {"alpha", c.alpha},       {"p", c.p},
          {"eps0", c.eps0},         {"seed", c.seed},         {"samples", c.samples},
          {"segments", c.segments}, {"starts", c.starts},     {"tol", c.tol},
          {"from", c.from},         {"to", c.to},             {"r", c.r},
          {"center", c.center},     {"function", c.function}, {"case", c.chain_case},
          {"format", c.format},     {"dump", c.dump},         {"threads", c.threads}};
}

// CSV for results without a natural table: one key,value row per scalar leaf.
void flatten_csv(std::ostream& os, const Json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_csv(os, v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten_csv(os, j[i], prefix + "." + std::to_string(i));
    }
  } else {
    os << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

struct Outcome {
  Json result;
  int code = kExitOk;
  std::function<void(std::ostream&)> csv;  // table form, if any
};

int worst(int a, int b) {
  auto rank = [](int c) { return c == kExitViolation ? 2 : (c == kExitInconclusive ? 1 : 0); };
  return rank(a) >= rank(b) ? a : b;
}

OracleConfig oracle_config(const RunConfig& c) {
  OracleConfig oc;
  oc.segments = c.segments;
  oc.starts = c.starts;
  oc.seed = c.seed;
  oc.tol = c.tol;
  oc.threads = c.threads;
  if (oc.segments < 1 || oc.starts < 1) throw std::invalid_argument("segments and starts must be >= 1");
  if (!(oc.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  return oc;
}

Outcome run_distance(const RunConfig& c, const FrameParams& fp) {
  if (c.from.empty() || c.to.empty()) throw std::invalid_argument("distance needs --from and --to");
  const SpacePoint p = space_point(c.from, "--from");
  const SpacePoint q = space_point(c.to, "--to");
  const DistanceBracket b = cc_bracket(p, q, fp, oracle_config(c));
  Outcome o;
  o.result = {{"delta", to_json(delta(p, q, fp))}, {"bracket", to_json(b)}};
  if (b.lower > b.upper * (1.0 + 1e-12)) o.code = kExitViolation;
  else if (!b.certified) o.code = kExitInconclusive;
  HorizontalPath w = b.witness;
  o.csv = [w, fp](std::ostream& os) { write_path_csv(os, w.sample(fp, 16)); };
  return o;
}

Outcome run_ball(const RunConfig& c, const FrameParams& fp) {
  const SpacePoint p = space_point(c.center, "--center");
  if (!(c.r > 0.0)) throw std::invalid_argument("--r must be > 0");
  const MeasureEstimate vol = ball_volume_mc(p, c.r, fp, samples_or(c, 200000), c.seed);
  Outcome o;
  o.result = {{"volume", to_json(vol)},
              {"box_volume_flat", box_volume(BoxSpec(BoxVariant::Flat, p, c.r), fp)}};
  if (p.x != 0.0) {
    o.result["box_volume_tilted"] = box_volume(BoxSpec(BoxVariant::Tilted, p, c.r), fp);
  }
  return o;
}

Outcome run_mu(const RunConfig& c, const FrameParams& fp) {
  const SurfacePoint u = surface_point(c.center, "--center");
  if (!(c.r > 0.0)) throw std::invalid_argument("--r must be > 0");
  const MeasureEstimate mu = mu_ball_mc(u, c.r, fp, samples_or(c, 200000), c.seed);
  Outcome o;
  o.result = {{"mu", to_json(mu)},
              {"surrogate", ahlfors_surrogate(u, c.r, fp)},
              {"box_section_flat", mu_box_section(BoxSpec(BoxVariant::Flat, u.lifted(), c.r), fp)}};
  if (u.x != 0.0) {
    o.result["box_section_tilted"] =
        mu_box_section(BoxSpec(BoxVariant::Tilted, u.lifted(), c.r), fp);
  }
  return o;
}

Outcome run_ahlfors(const RunConfig& c, const FrameParams& fp) {
  AhlforsMcConfig mc;
  mc.samples = samples_or(c, mc.samples);
  mc.seed = c.seed;
  const AhlforsReport rep = ahlfors_audit(fp, AhlforsGrid::standard(), mc);
  Outcome o;
  o.result = to_json(rep);
  o.code = rep.violations > 0 ? kExitViolation : (rep.inconclusive > 0 ? kExitInconclusive : kExitOk);
  o.csv = [rep](std::ostream& os) { write_ahlfors_csv(os, rep); };
  return o;
}

Outcome run_ballbox(const RunConfig& c, const FrameParams& fp) {
  const BallBoxAudit a = ballbox_audit(fp, static_cast<int>(samples_or(c, 10000)), c.seed);
  Outcome o;
  o.result = to_json(a);
  o.code = a.disagreements > 0 ? kExitViolation : kExitOk;
  return o;
}

Outcome run_chain(const RunConfig& c, const FrameParams& fp) {
  if (c.from.empty() || c.to.empty()) throw std::invalid_argument("chain needs --from and --to");
  const SurfacePoint u = surface_point(c.from, "--from");
  const SurfacePoint v = surface_point(c.to, "--to");
  const ChainConfig cc(c.eps0);
  std::vector<ChainSpec> chains;
  Json norm;
  if (c.chain_case == "auto") {
    chains = chains_for_pair(u, v, fp, cc);
  } else if (c.chain_case == "char" || c.chain_case == "nonchar") {
    const ChainKind kind = c.chain_case == "char" ? ChainKind::Characteristic
                                                  : ChainKind::Noncharacteristic;
    const Normalization n = normalize(u, v, kind);
    norm = to_json(n);
    for (const auto& pr : n.pairs) {
      ChainSpec s = kind == ChainKind::Characteristic ? char_chain(pr.from, pr.to, fp)
                                                      : nonchar_chain(pr.from, pr.to, fp, cc);
      s.reflected = n.reflected;
      chains.push_back(std::move(s));
    }
  } else {
    throw std::invalid_argument("--case must be auto, char or nonchar");
  }
  Outcome o;
  Json list = Json::array();
  double err = 0.0, low = 0.0, length = 0.0;
  for (const auto& s : chains) {
    Json j = to_json(s);
    const double e = replay_error(s, fp);
    const double h = min_height(s, fp);
    j["endpoint_err"] = e;
    j["min_z"] = h;
    list.push_back(j);
    err = std::max(err, e);
    low = std::min(low, h);
    length += path_length(s.path()).sup_norm;
  }
  const double d = delta_plane(u, v, fp);
  o.result = {{"classification", to_string(classify(u, v, fp, cc))},
              {"delta_plane", d},
              {"chains", list},
              {"endpoint_err", err},
              {"min_z", low},
              {"length", length},
              {"length_over_delta", d > 0.0 ? length / d : 0.0}};
  if (!norm.is_null()) o.result["normalization"] = norm;
  if (err > 1e-9 || low < -1e-12) o.code = kExitViolation;
  o.csv = [chains](std::ostream& os) { write_chain_csv(os, chains); };
  return o;
}

TraceConfig trace_config(const RunConfig& c, std::int64_t default_samples) {
  TraceConfig tc;
  tc.mc.samples = samples_or(c, default_samples);
  tc.mc.seed = c.seed;
  return tc;
}

Outcome run_trace(const RunConfig& c, const FrameParams& fp) {
  const BesovParams bp(c.p);
  const ScalarField f = builtin_field(c.function, fp);
  TraceConfig tc = trace_config(c, 200000);
  std::vector<BesovSample> samples;
  if (!c.dump.empty()) tc.mc.dump = &samples;
  Outcome o;
  try {
    const TraceReport rep = trace_ratio(f, fp, bp, tc);
    o.result = to_json(rep);
    o.code = rep.status == "ok" ? kExitOk : kExitInconclusive;
  } catch (const std::domain_error& e) {
    o.result = {{"error", e.what()}};
    o.code = kExitViolation;
    return o;
  }
  if (!c.dump.empty()) {
    std::ofstream dump(c.dump);
    if (!dump) throw std::invalid_argument("cannot open --dump file " + c.dump);
    write_besov_samples_csv(dump, samples);
  }
  return o;
}

Outcome run_audit_all(const RunConfig& c, const FrameParams& fp) {
  Outcome o;
  Json sections = Json::object();

  const BallBoxAudit bb = ballbox_audit(fp, 2000, c.seed);
  sections["ballbox"] = to_json(bb);
  if (bb.disagreements > 0) o.code = worst(o.code, kExitViolation);

  const ChainConfig cc(c.eps0);
  for (ChainKind kind : {ChainKind::Characteristic, ChainKind::Noncharacteristic}) {
    Rng rng(c.seed, kind == ChainKind::Characteristic ? 11 : 12);
    double err = 0.0, zviol = 0.0, ratio = 0.0;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
      const auto [u, v] = sample_case_pair(kind, fp, cc, rng);
      const ChainAudit a = chain_audit(u, v, fp, cc);
      err = std::max(err, a.endpoint_err);
      zviol = std::max(zviol, a.max_z_violation);
      ratio = std::max(ratio, a.length_over_delta);
    }
    const double band = chain_length_band(fp, kind);
    const bool ok = err <= 1e-9 && zviol <= 1e-12 && ratio <= band;
    sections[kind == ChainKind::Characteristic ? "chains_char" : "chains_nonchar"] = {
        {"pairs", n}, {"max_endpoint_err", err}, {"max_z_violation", zviol},
        {"max_length_over_delta", ratio}, {"band", band}, {"ok", ok}};
    if (!ok) o.code = worst(o.code, kExitViolation);
  }

  const MonotonicityReport mono = monotonicity_audits(fp);
  sections["monotonicity"] = to_json(mono);
  if (!mono.decreasing) o.code = worst(o.code, kExitViolation);

  AhlforsMcConfig mc;
  mc.seed = c.seed;
  const AhlforsReport ah = ahlfors_audit(fp, AhlforsGrid::standard(), mc);
  sections["ahlfors"] = {{"violations", ah.violations}, {"inconclusive", ah.inconclusive},
                         {"status", ah.status}};
  if (ah.violations > 0) o.code = worst(o.code, kExitViolation);
  else if (ah.inconclusive > 0) o.code = worst(o.code, kExitInconclusive);

  const EquivalenceReport eq = equivalence_audit(fp, 8, c.seed, oracle_config(c));
  sections["equivalence"] = to_json(eq);
  if (eq.sandwich_violations > 0 || eq.band_violations > 0) o.code = worst(o.code, kExitViolation);
  else if (eq.uncertified > 0) o.code = worst(o.code, kExitInconclusive);

  const TraceReport tr =
      trace_ratio(builtin_field(c.function, fp), fp, BesovParams(c.p), trace_config(c, 50000));
  sections["trace"] = {{"ratio", tr.ratio}, {"ratio_half_width", tr.ratio_half_width},
                       {"status", tr.status}};
  if (tr.status != "ok") o.code = worst(o.code, kExitInconclusive);

  o.result = sections;
  return o;
}

Outcome run(const RunConfig& c) {
  const FrameParams fp(c.alpha);
  if (!(c.eps0 > 0.0 && c.eps0 < 1.0)) throw std::invalid_argument("--eps0 must lie in (0, 1)");
  if (c.samples < 0) throw std::invalid_argument("--samples must be >= 0");
  if (c.command == "distance") return run_distance(c, fp);
  if (c.command == "ball") return run_ball(c, fp);
  if (c.command == "mu") return run_mu(c, fp);
  if (c.command == "ahlfors") return run_ahlfors(c, fp);
  if (c.command == "ballbox-audit") return run_ballbox(c, fp);
  if (c.command == "chain") return run_chain(c, fp);
  if (c.command == "trace") return run_trace(c, fp);
  return run_audit_all(c, fp);
}

const char* status_name(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitViolation: return "violation";
    case kExitInconclusive: return "inconclusive";
  }
  return "error";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app("Martinet-type frame geometry: distances, balls, chains and trace estimates",
               "martinet");
  app.add_option("command", cfg.command, "subcommand")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--alpha", cfg.alpha, "frame exponent (>= 1)");
  app.add_option("--p", cfg.p, "integrability exponent (> 1)");
  app.add_option("--eps0", cfg.eps0, "case threshold for chains");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--samples", cfg.samples, "Monte Carlo samples or audit size");
  app.add_option("--segments", cfg.segments, "oracle control segments");
  app.add_option("--starts", cfg.starts, "oracle multi-starts");
  app.add_option("--tol", cfg.tol, "oracle endpoint tolerance");
  app.add_option("--from", cfg.from, "start point x,y[,z]")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--to", cfg.to, "end point x,y[,z]")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--r", cfg.r, "radius");
  app.add_option("--center", cfg.center, "center x,y[,z]")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--function", cfg.function, "builtin field: gauss, poly_bump, delta_radial");
  app.add_option("--case", cfg.chain_case, "chain case: auto, char, nonchar");
  app.add_option("--output", cfg.output, "write results to this file");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--dump", cfg.dump, "trace: CSV file for the Monte Carlo samples");
  app.add_option("--threads", cfg.threads, "worker threads (default: MARTINET_THREADS)");
  app.set_config("--config", "", "key=value file; flags on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  if (cfg.threads > 0) set_default_threads(cfg.threads);
  Outcome o;
  try {
    o = run(cfg);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }

  Json doc = {{"config", config_json(cfg)}, {"status", status_name(o.code)}, {"result", o.result}};
  std::ofstream file;
  std::ostream* os = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot open " << cfg.output << "\n";
      return kExitValidation;
    }
    os = &file;
  }
  if (cfg.format == "csv") {
    if (o.csv) o.csv(*os);
    else flatten_csv(*os, doc, "");
  } else {
    *os << doc.dump(2) << "\n";
  }
  return o.code;
}

}  // namespace martinet
