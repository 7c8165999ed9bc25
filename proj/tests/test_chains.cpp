#include <doctest.h>

#include <numbers>

#include "martinet/chains.hpp"
#include "martinet/fields.hpp"
#include "support.hpp"

using namespace martinet;
using namespace martinet::testing;

namespace {

void check_point(const SpacePoint& p, const SpacePoint& want) {
  CHECK(relative_error(p, want) <= 1e-12);
}

double sup_length(const ChainSpec& c) {
  double s = 0.0;
  for (const auto& seg : c.segments) s += seg.duration;
  return s;
}

const double kAlphas[] = {1.0, 1.5, 2.0, 3.0};

}  // namespace

TEST_CASE("characteristic chain worked example") {
  const FrameParams fp(1.0);
  const ChainSpec c = char_chain({1, 0}, {2, 1}, fp);
  CHECK(c.case_label == CaseLabel::Characteristic);
  CHECK(c.tau == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  REQUIRE(c.points.size() == 6);
  check_point(c.points[0], {1, 0, 0});
  check_point(c.points[1], {1, 1, 1});
  check_point(c.points[2], {0.5, 1, 1});
  check_point(c.points[3], {0.5, 5.0 / 3.0, 4.0 / 3.0});
  check_point(c.points[4], {2, 5.0 / 3.0, 4.0 / 3.0});
  check_point(c.points[5], {2, 1, 0});
  CHECK(sup_length(c) == doctest::Approx(13.0 / 3.0).epsilon(1e-14));
  CHECK(sup_length(c) / delta_plane({1, 0}, {2, 1}, fp) ==
        doctest::Approx(13.0 / 9.0).epsilon(1e-14));
  CHECK(replay_error(c, fp) <= 1e-12);
}

TEST_CASE("noncharacteristic chain worked example") {
  const FrameParams fp(1.0);
  const ChainSpec c = nonchar_chain({2, 0}, {1, 1}, fp, ChainConfig());
  CHECK(c.case_label == CaseLabel::Noncharacteristic);
  CHECK(c.sigma == 2.0);
  CHECK(c.z_prime == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(c.tau == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
  REQUIRE(c.points.size() == 7);
  check_point(c.points[1], {2, 2, 4});
  check_point(c.points[2], {1, 1, 2.5});
  check_point(c.points.back(), {1, 1, 0});
  CHECK(replay_error(c, fp) <= 1e-12);
}

TEST_CASE("tau at alpha = 2") {
  const FrameParams fp(2.0);
  CHECK(nonchar_z_prime(2, 1, 1, fp) == doctest::Approx(17.0 / 3.0).epsilon(1e-15));
  // tau^3 + 2 tau^2 = 17/3, solved independently to 21 digits.
  CHECK(tau_nonchar(2, 1, 1, fp, ChainConfig()) ==
        doctest::Approx(1.30868750938287281139).epsilon(1e-12));
}

TEST_CASE("tau equals sqrt(z') at alpha = 1") {
  const FrameParams fp(1.0);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double xp = std::pow(10.0, rng.uniform(-2, 2));
    const double x = xp + std::pow(10.0, rng.uniform(-2, 2));
    const double dy = std::pow(10.0, rng.uniform(-2, 2));
    const double zp = nonchar_z_prime(x, xp, dy, fp);
    CHECK(tau_nonchar(x, xp, dy, fp, ChainConfig()) ==
          doctest::Approx(std::sqrt(zp)).epsilon(1e-12));
  }
}

TEST_CASE("tau root residual and size estimate") {
  Rng rng(6);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    for (int i = 0; i < 2000; ++i) {
      const double xp = rng.coin() ? 0.0 : std::pow(10.0, rng.uniform(-3, 3));
      const double target = std::pow(10.0, rng.uniform(-6, 6));
      const RootResult r = solve_tau(xp, target, fp);
      CHECK(std::fabs(r.residual) <= 1e-12 * (1.0 + target));
      const long double t = r.root;
      const long double lx = xp;
      const long double diff =
          xp > 0.0 ? std::pow(lx, static_cast<long double>(alpha)) *
                         std::expm1(alpha * std::log1p(t / lx))
                   : std::pow(t, static_cast<long double>(alpha));
      CHECK(std::fabs(static_cast<double>(t * diff - target)) <= 1e-12 * (1.0 + target));
      double est = std::pow(target, 1.0 / (alpha + 1.0));
      if (xp > 0.0) est = std::min(est, std::sqrt(target / std::pow(xp, alpha - 1.0)));
      CHECK(est / r.root <= 2.5);
      CHECK(est / r.root >= 0.4);
    }
  }
  CHECK(solve_tau(1.0, 0.0, FrameParams(2.0)).root == 0.0);
  CHECK_THROWS_AS(solve_tau(1.0, -1.0, FrameParams(2.0)), std::domain_error);
}

TEST_CASE("z' is nonnegative and positive off the diagonal") {
  Rng rng(7);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    for (int i = 0; i < 2000; ++i) {
      const double xp = std::pow(10.0, rng.uniform(-2, 2));
      const double x = xp + std::pow(10.0, rng.uniform(-2, 2));
      const double dy = rng.coin() ? 0.0 : std::pow(10.0, rng.uniform(-2, 2));
      CHECK(nonchar_z_prime(x, xp, dy, fp) > 0.0);
    }
    CHECK(nonchar_z_prime(1.0, 1.0, 0.0, fp) == 0.0);
  }
}

TEST_CASE("characteristic tau bound") {
  Rng rng(8);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    const double k = std::pow(2.0, alpha) / (std::pow(2.0, alpha) - 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double xp = std::pow(10.0, rng.uniform(-2, 2));
      const double x = rng.uniform(-xp, xp);
      const double dy = std::pow(10.0, rng.uniform(-2, 2));
      const ChainSpec c = char_chain({x, 0}, {xp, dy}, fp);
      CHECK(c.tau <= k * dy * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("classification") {
  const FrameParams fp(2.0);
  const ChainConfig cfg(0.1);
  CHECK(classify({0, 0}, {1, 0}, fp, cfg) == CaseLabel::Characteristic);
  CHECK(classify({100, 0}, {100.5, 0}, fp, cfg) == CaseLabel::Noncharacteristic);
  // d = 2 + sqrt(1)*... : delta_plane((1,0),(30,0)) = 29 >= 0.1*30 and >= 0.1
  CHECK(classify({1, 0}, {30, 0}, fp, cfg) == CaseLabel::Characteristic);
  // d = 1 from x = 9.5 to x' = 10.5: 1 >= 0.95 fails only for x'
  CHECK(classify({9.5, 0}, {10.5, 0}, fp, cfg) == CaseLabel::Mixed);
  CHECK_THROWS_AS(ChainConfig(0.0), std::invalid_argument);
}

TEST_CASE("normalization") {
  const Normalization a = normalize({-1, 3}, {0.5, -2}, ChainKind::Characteristic);
  CHECK(a.reflected);
  CHECK_FALSE(a.has_third_point);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0].from == SurfacePoint{-0.5, -2});
  CHECK(a.pairs[0].to == SurfacePoint{1, 3});

  const Normalization b = normalize({3, 0}, {1, 1}, ChainKind::Characteristic);
  CHECK(b.has_third_point);
  CHECK(b.third_point == SurfacePoint{5, 2});
  REQUIRE(b.pairs.size() == 2);

  const Normalization c = normalize({1, 0}, {1.5, 1}, ChainKind::Noncharacteristic);
  CHECK(c.has_third_point);
  CHECK(c.third_point == SurfacePoint{0.5, 2});

  CHECK_THROWS_AS(normalize({1, 0}, {3, 1}, ChainKind::Noncharacteristic), std::domain_error);
}

TEST_CASE("degenerate pairs") {
  const FrameParams fp(2.0);
  for (const auto& c : chains_for_pair({1, 1}, {1, 1}, fp, ChainConfig())) {
    CHECK(sup_length(c) == 0.0);
    CHECK(replay_error(c, fp) == 0.0);
  }
  // The characteristic construction still detours through x/2.
  const ChainSpec same = char_chain({1, 1}, {1, 1}, fp);
  CHECK(sup_length(same) == doctest::Approx(1.0));
  CHECK(replay_error(same, fp) <= 1e-12);
  const ChainSpec axis = char_chain({0, 0}, {0, 2}, fp);
  CHECK(replay_error(axis, fp) <= 1e-12);
  CHECK(min_height(axis, fp) == 0.0);
  const ChainSpec flat = nonchar_chain({2, 1}, {2, 1}, fp, ChainConfig());
  CHECK(flat.tau == 0.0);
  CHECK_THROWS_AS(char_chain({2, 0}, {1, 1}, fp), std::domain_error);
  CHECK_THROWS_AS(nonchar_chain({1, 0}, {2, 1}, fp, ChainConfig()), std::domain_error);
}

TEST_CASE("chains close, stay above the plane and respect the length band") {
  const ChainConfig cfg;
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    Rng rng(100 + static_cast<std::uint64_t>(alpha * 10));
    for (ChainKind kind : {ChainKind::Characteristic, ChainKind::Noncharacteristic}) {
      const double band = chain_length_band(fp, kind);
      for (int i = 0; i < 500; ++i) {
        const auto [u, v] = sample_case_pair(kind, fp, cfg, rng);
        const ChainAudit a = chain_audit(u, v, fp, cfg);
        CHECK(a.endpoint_err <= 1e-9);
        CHECK(a.max_z_violation <= 1e-12);
        CHECK(a.length_over_delta <= band);
      }
    }
  }
}

TEST_CASE("chains for arbitrary pairs join the right endpoints") {
  const ChainConfig cfg;
  Rng rng(31);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    for (int i = 0; i < 500; ++i) {
      const SurfacePoint u{signed_log(rng), signed_log(rng)};
      const SurfacePoint v{signed_log(rng), signed_log(rng)};
      const auto chains = chains_for_pair(u, v, fp, cfg);
      REQUIRE_FALSE(chains.empty());
      for (const auto& c : chains) {
        CHECK(replay_error(c, fp) <= 1e-9);
        CHECK(min_height(c, fp) >= -1e-12);
      }
      // Either one chain u -> v, or two chains meeting at a third point.
      const auto ends = [&](const ChainSpec& c) { return std::pair{c.from(), c.to()}; };
      if (chains.size() == 1) {
        const auto [a, b] = ends(chains[0]);
        const bool forward = a == u && b == v;
        const bool backward = a == v && b == u;
        CHECK((forward || backward));
      } else {
        REQUIRE(chains.size() == 2);
        CHECK(chains[0].to() == chains[1].to());
      }
    }
  }
}

TEST_CASE("chains commute with y-translation and dilation") {
  const ChainConfig cfg;
  Rng rng(41);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    for (ChainKind kind : {ChainKind::Characteristic, ChainKind::Noncharacteristic}) {
      for (int i = 0; i < 100; ++i) {
        const auto [u, v] = sample_case_pair(kind, fp, cfg, rng);
        const auto base = chains_for_pair(u, v, fp, cfg);
        const double eta = signed_log(rng);
        const auto shifted = chains_for_pair({u.x, u.y + eta}, {v.x, v.y + eta}, fp, cfg);
        const double r = std::pow(10.0, rng.uniform(-1, 1));
        const auto scaled = chains_for_pair({r * u.x, r * u.y}, {r * v.x, r * v.y}, fp, cfg);
        REQUIRE(shifted.size() == base.size());
        REQUIRE(scaled.size() == base.size());
        for (std::size_t k = 0; k < base.size(); ++k) {
          REQUIRE(shifted[k].segments.size() == base[k].segments.size());
          REQUIRE(scaled[k].segments.size() == base[k].segments.size());
          const double len = sup_length(base[k]);
          for (std::size_t j = 0; j < base[k].segments.size(); ++j) {
            CHECK(shifted[k].segments[j].generator == base[k].segments[j].generator);
            CHECK(std::fabs(shifted[k].segments[j].duration - base[k].segments[j].duration) <=
                  1e-9 * (len + std::fabs(eta)));
            CHECK(scaled[k].segments[j].generator == base[k].segments[j].generator);
            CHECK(std::fabs(scaled[k].segments[j].duration - r * base[k].segments[j].duration) <=
                  1e-9 * r * len);
          }
        }
      }
    }
  }
}

TEST_CASE("gradient line integral on simple fields") {
  const FrameParams fp(2.0);
  ChainSpec c;
  c.points = {{0.5, 0, 0}, {3.0, 0, 0}};
  c.segments = {{Generator::PlusX1, 2.5}};
  ScalarField constant{"constant", [](const SpacePoint&) { return 7.0; },
                       [](const SpacePoint&) { return Gradient3{0, 0, 0}; }, {}};
  CHECK(gradient_line_integral(constant, c, fp) == 0.0);
  ScalarField linear{"x", [](const SpacePoint& p) { return p.x; },
                     [](const SpacePoint&) { return Gradient3{1, 0, 0}; }, {}};
  CHECK(gradient_line_integral(linear, c, fp) == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("gradient line integral bounds the increment") {
  const ChainConfig cfg;
  Rng rng(51);
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    const ScalarField f = random_smooth_field(static_cast<std::uint64_t>(alpha * 4));
    for (int i = 0; i < 50; ++i) {
      const SurfacePoint u{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      const SurfacePoint v{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      double bound = 0.0;
      for (const auto& c : chains_for_pair(u, v, fp, cfg)) bound += gradient_line_integral(f, c, fp);
      CHECK(std::fabs(f.value(u.lifted()) - f.value(v.lifted())) <= bound + 1e-7);
    }
  }
}

TEST_CASE("monotonicity quantities") {
  CHECK(tau_hat(5.0, 0.0, 0.0, FrameParams(2.0)) == 0.0);
  CHECK(tau_hat_sensitivity(5.0, 0.0, 0.0, FrameParams(2.0)) == 0.0);
  // alpha = 1: z-hat = h2^2 + h1^2/2 and tau-hat = sqrt(z-hat), independent of x'.
  const FrameParams f1(1.0);
  for (double xp : {3.0, 20.0, 100.0}) {
    const double h1 = 0.6, h2 = 0.8;
    const double t = std::sqrt(h2 * h2 + h1 * h1 / 2.0);
    CHECK(z_hat(xp, h1, h2, f1) == doctest::Approx(t * t).epsilon(1e-12));
    CHECK(tau_hat(xp, h1, h2, f1) == doctest::Approx(t).epsilon(1e-12));
    CHECK(tau_hat_sensitivity(xp, h1, h2, f1) == doctest::Approx(t / xp).epsilon(1e-6));
  }
}

TEST_CASE("time change defect matches a finite difference") {
  for (double alpha : kAlphas) {
    const FrameParams fp(alpha);
    const double x = 12.0, h1 = 0.7, h2 = 0.5;
    const double s = h2 * h2 / x + h1;
    auto phi = [&](double t) {
      return (s * std::pow(x, alpha) + (std::pow(x - t, alpha + 1) - std::pow(x, alpha + 1)) /
                                           (alpha + 1)) /
             std::pow(x - t, alpha);
    };
    for (double t : {0.0, 0.3, 0.7}) {
      const double e = 1e-5;
      const double fd = std::fabs((phi(t + e) - phi(t - e)) / (2 * e) + 1.0);
      CHECK(time_change_defect(x, h1, h2, t, fp) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("monotonicity audit decreases with eps0") {
  for (double alpha : kAlphas) {
    const MonotonicityReport rep = monotonicity_audits(FrameParams(alpha));
    CHECK(rep.decreasing);
    REQUIRE(rep.rows.size() == 3);
  }
}
