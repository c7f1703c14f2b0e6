#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "cflow/inequality_lab.hpp"

using namespace cflow;

TEST_CASE("derived seeds are deterministic and distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  // First splitmix64 output for state 0.
  CHECK(derive_seed(0, 0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("random bodies: deterministic, symmetric, convex with margin") {
  BodySpec s;
  s.seed = 42;
  const SupportFn a = random_body(s);
  const SupportFn b = random_body(s);
  CHECK(oracle::sup_diff(oracle::vec(a.samples()), oracle::vec(b.samples())) == 0.0);
  CHECK(a.symmetric());
  for (std::uint64_t i = 0; i < 50; ++i) {
    s.seed = derive_seed(1, i);
    const SupportFn k = random_body(s);
    CHECK(k.min_curvature() >= 0.05 * (1.0 - 1e-9));
    CHECK(spectral::tail_fraction(k.samples(), 2 * static_cast<std::size_t>(s.mode_count)) < 1e-25);
  }
  s.decay = 1.0;
  CHECK_THROWS_AS(random_body(s), GeomError);
}

TEST_CASE("ellipses are equality cases") {
  const SupportFn e = ellipse(256, 1.7, 0.8, 0.3);
  CHECK(std::abs(bp_deficit(e)) < 1e-10);
  CHECK(santalo_product(e) == doctest::Approx(kPi * kPi).epsilon(1e-10));
  CHECK(petty_projection_product(e) == doctest::Approx(0.25 * kPi * kPi).epsilon(1e-10));
  CHECK(std::abs(ratio_derivative_rhs(e)) < 1e-8);
}

TEST_CASE("Busemann-Petty deficit of a wobbled disk against polygon moments") {
  const oracle::Fn h = [](double t) { return 1.0 + 0.2 * std::cos(2 * t); };
  // Polygon errors are O(m^-2); Richardson extrapolation over m and 2m.
  auto eps_at = [&](std::size_t m) {
    const auto poly = oracle::polygon(h, m);
    const double v = oracle::area(poly);
    const auto gpoly = oracle::polygon([&](double t) { return oracle::abs_moment(poly, t) / v; }, m);
    return oracle::area(gpoly) / v / kBPConstant - 1.0;
  };
  const double eps_oracle = (4.0 * eps_at(4000) - eps_at(2000)) / 3.0;
  const SupportFn K = make_support_fn(oracle::sample(h, 256), true);
  CHECK(eps_oracle > 0.0);
  CHECK(bp_deficit(K) == doctest::Approx(eps_oracle).epsilon(1e-4).scale(0.0));
}

TEST_CASE("Groemer gap for an ellipse against the disk in closed form") {
  const double a = 1.5, b = 0.8;
  const double e = std::sqrt(1.0 - b * b / (a * a));
  const double vkl = 2.0 * a * std::comp_ellint_2(e);
  const double lhs = vkl * vkl / (kPi * a * b * kPi) - 1.0;
  const double dev = (std::sqrt(a / b) - 1.0) / std::sqrt(kPi);
  const double rhs = kPi * a * b / (4.0 * 4.0 * a * a) * dev * dev;
  CHECK(groemer_gap(ellipse(256, a, b), disk(256)) == doctest::Approx(lhs - rhs).epsilon(1e-8));
  CHECK(std::abs(groemer_gap(disk(64, 2.0), disk(64))) < 1e-14);
}

TEST_CASE("deficit report") {
  BodySpec s;
  s.seed = 5;
  const SupportFn K = random_body(s);
  const DeficitReport r = deficit_report(9, K, true);
  CHECK(r.id == 9);
  CHECK(r.bp_deficit >= 0.0);
  CHECK(r.santalo_gap >= 0.0);
  CHECK(r.petty_gap >= 0.0);
  CHECK(r.groemer_gap >= 0.0);
  CHECK(r.d_bm >= 1.0);
  CHECK(r.d_bm <= r.pinching_bound);
  CHECK(ratio_derivative_rhs(K) <= 0.0);
  CHECK(std::isnan(deficit_report(0, K, false).d_bm));
}

TEST_CASE("random GL maps respect the condition bound") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const LinearMap2 m = random_gl_map(derive_seed(3, i), 4.0);
    CHECK(m.condition_number() <= 4.0 * (1.0 + 1e-12));
  }
}

TEST_CASE("property: affine functionals under GL maps") {
  BodySpec s;
  s.amplitude = 0.05;
  s.n = 512;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  for (std::uint64_t i = 0; i < 6; ++i) {
    s.seed = derive_seed(11, i);
    const SupportFn K = random_body(s);
    const LinearMap2 g = random_gl_map(derive_seed(12, i), 5.0);
    const SupportFn M = apply_linear_map(K, g);
    CHECK(rel(bp_deficit(M) + 1.0, bp_deficit(K) + 1.0) <= 1e-5);
    CHECK(rel(santalo_product(M), santalo_product(K)) <= 1e-5);
    CHECK(rel(petty_projection_product(M), petty_projection_product(K)) <= 1e-5);
    // d/dt of a dimensionless ratio picks up det^-2 from the time scale.
    CHECK(rel(ratio_derivative_rhs(M) * g.det() * g.det(), ratio_derivative_rhs(K)) <= 1e-5);
  }
}

TEST_CASE("fuzz campaigns are deterministic and clean") {
  FuzzOptions o;
  o.count = 20;
  o.seed = 7;
  o.with_bm = true;
  const FuzzReport a = fuzz_campaign(o);
  const FuzzReport b = fuzz_campaign(o);
  REQUIRE(a.checks.size() == fuzz_check_names().size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].min_gap == b.checks[i].min_gap);
    CHECK(a.checks[i].argmin_seed == b.checks[i].argmin_seed);
    CHECK(a.checks[i].count == 20);
  }
  CHECK(a.ok());
  o.checks = {"santalo"};
  o.with_bm = false;
  const FuzzReport c = fuzz_campaign(o);
  REQUIRE(c.checks.size() == 1);
  CHECK(c.checks[0].min_gap >= -kGapTolerance);
  o.checks = {"nonsense"};
  CHECK_THROWS_AS(fuzz_campaign(o), GeomError);
}

TEST_CASE("GL-mapped fuzzing on gentle bodies") {
  FuzzOptions o;
  o.count = 10;
  o.seed = 3;
  o.random_maps = true;
  o.body.amplitude = 0.05;
  o.checks = {"santalo", "petty", "minkowski", "lambda", "lutwak"};
  CHECK(fuzz_campaign(o).ok());
}

TEST_CASE("small stability experiment") {
  StabilityOptions o;
  o.samples = 12;
  o.seed = 2;
  o.eps_min = 1e-6;
  o.eps_max = 1e-3;
  const StabilityResult r = stability_experiment(o);
  REQUIRE(r.samples.size() == 12);
  CHECK(r.samples[0].eps == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(std::isfinite(r.gamma));
  for (const StabilitySample& s : r.samples) {
    CHECK(s.d_bm_minus_1 <= r.gamma * std::pow(std::max(s.eps, 0.0), 0.25) + 1e-12);
    if (s.reached && s.target_eps > 0.0) CHECK(s.eps == doctest::Approx(s.target_eps).epsilon(0.011));
  }
  CHECK(r.slope > 0.2);
  const StabilityResult again = stability_experiment(o);
  CHECK(again.gamma == r.gamma);
  o.samples = 3;
  CHECK_THROWS_AS(stability_experiment(o), GeomError);
}
