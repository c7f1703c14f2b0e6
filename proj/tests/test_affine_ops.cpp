#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cflow/affine_ops.hpp"
#include "cflow/inequality_lab.hpp"

using namespace cflow;

namespace {

const oracle::Fn wobble = [](double t) { return 1.0 + 0.2 * std::cos(2 * t) + 0.02 * std::sin(4 * t); };

SupportFn body(const oracle::Fn& h, std::size_t n = 256) { return make_support_fn(oracle::sample(h, n), true); }

double sup(const SupportFn& a, const SupportFn& b) {
  return oracle::sup_diff(oracle::vec(a.samples()), oracle::vec(b.samples()));
}

SupportFn random_symmetric(std::uint64_t seed, double amplitude = 0.4) {
  BodySpec s;
  s.seed = seed;
  s.amplitude = amplitude;
  return random_body(s);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const GeomError& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("polar body of an ellipse is the reciprocal ellipse") {
  const SupportFn e = ellipse(256, 1.8, 0.7, 0.3);
  CHECK(sup(polar_body(e), ellipse(256, 1.0 / 1.8, 1.0 / 0.7, 0.3)) < 1e-10);
  CHECK(polar_area(e) == doctest::Approx(kPi / (1.8 * 0.7)).epsilon(1e-12));
}

TEST_CASE("polar area against the polygon of the polar body") {
  const auto poly = oracle::polygon(wobble, 4000);
  const auto polar = oracle::polygon([&](double t) { return 1.0 / oracle::radial(poly, t); }, 4000);
  CHECK(polar_area(body(wobble)) == doctest::Approx(oracle::area(polar)).epsilon(1e-5));
}

TEST_CASE("property: polar involution on resolved random bodies") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const SupportFn K = random_symmetric(derive_seed(123, s), 0.05);
    CHECK(sup(polar_body(polar_body(K)), K) < 1e-6 * K.max_value());
  }
  const SupportFn e = ellipse(256, 1.5, 0.9, 0.2);
  CHECK(sup(polar_body(polar_body(e)), e) < 1e-9);
}

TEST_CASE("property: polar body under linear maps") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SupportFn K = random_symmetric(5, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    const LinearMap2 m(1.0 + 0.3 * u(gen), 0.3 * u(gen), 0.3 * u(gen), 1.0 + 0.3 * u(gen));
    const SupportFn lhs = polar_body(apply_linear_map(K, m));
    const SupportFn rhs = apply_linear_map(polar_body(K), m.inverse_transpose());
    CHECK(sup(lhs, rhs) < 1e-6 * rhs.max_value());
  }
}

TEST_CASE("centroid body against exact polygon moments") {
  const SupportFn G = centroid_body(body(wobble));
  const auto poly = oracle::polygon(wobble);
  const double v = oracle::area(poly);
  double err = 0.0;
  for (std::size_t j = 0; j < G.size(); j += 8) err = std::max(err, std::abs(G[j] - oracle::abs_moment(poly, 2.0 * kPi * j / G.size()) / v));
  CHECK(err < 1e-7);
  const SupportFn D = centroid_body(disk(64));
  for (double x : D.samples()) CHECK(x == doctest::Approx(4.0 / (3.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("property: centroid body is SL(2) equivariant") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SupportFn K = body(wobble);
  for (int trial = 0; trial < 5; ++trial) {
    const LinearMap2 m = SL2Map::stretch_rotation(1.0 + 0.5 * u(gen), kPi * u(gen)).map();
    CHECK(sup(centroid_body(apply_linear_map(K, m)), apply_linear_map(centroid_body(K), m)) < 1e-6);
  }
}

TEST_CASE("projection body is the rotated difference body") {
  const SupportFn P = projection_body(body(wobble));
  const auto expect = oracle::sample([](double t) { return wobble(t + kPi / 2) + wobble(t - kPi / 2); }, 256);
  CHECK(oracle::sup_diff(oracle::vec(P.samples()), expect) < 1e-12);
  CHECK(P.symmetric());
}

TEST_CASE("mixed volume identities and the Minkowski inequality") {
  const SupportFn K = body(wobble);
  CHECK(mixed_volume(K, K) == doctest::Approx(area(K)).epsilon(1e-13));
  CHECK(mixed_volume(K, disk(256)) == doctest::Approx(0.5 * perimeter(K)).epsilon(1e-13));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SupportFn A = random_symmetric(derive_seed(1, s));
    const SupportFn B = random_symmetric(derive_seed(2, s));
    const double v = mixed_volume(A, B);
    CHECK(v * v >= area(A) * area(B) * (1.0 - 1e-12));
    CHECK(v == doctest::Approx(mixed_volume(B, A)).epsilon(1e-12));
  }
  CHECK(kind_of([&] { mixed_volume(K, disk(128)); }) == ErrorKind::GridMismatch);
}

TEST_CASE("Minkowski solver recovers a body up to translation") {
  const oracle::Fn shifted = [](double t) { return wobble(t) + 0.1 * std::cos(t) - 0.05 * std::sin(t); };
  const SupportFn K = make_support_fn(oracle::sample(shifted, 256), false);
  const MinkowskiSolution sol = minkowski_solve(curvature_function(K));
  CHECK(sup(sol.h, body(wobble)) < 1e-12);
  CHECK(sol.residual < 1e-11);
  CHECK(std::abs(sol.translation_modes_removed[0]) < 1e-12);
  CHECK(sol.h.symmetric());

  const CurvatureFn open(oracle::sample([](double t) { return 1.0 + 0.5 * std::cos(t); }, 64));
  CHECK(kind_of([&] { minkowski_solve(open); }) == ErrorKind::ClosureViolated);

  const CurvatureFn weighted(std::vector<double>(64, 1.0), 4.0);
  const MinkowskiSolution w = minkowski_solve(weighted);
  CHECK(sup(w.h, disk(64, 4.0)) < 1e-13);
}

TEST_CASE("curvature image: ellipses are fixed, volume drops, SL(2) equivariance") {
  const SupportFn e = ellipse(256, 1.5, 0.8, 1.1);
  CHECK(sup(curvature_image(e), e) < 1e-7);
  CHECK(sup(curvature_image(disk(64)), disk(64)) < 1e-13);
  const SupportFn K = body(wobble);
  const SupportFn L = curvature_image(K);
  CHECK(area(L) <= area(K));
  const LinearMap2 m = SL2Map::stretch_rotation(1.4, 0.6).map();
  CHECK(sup(curvature_image(apply_linear_map(K, m)), apply_linear_map(L, m)) < 1e-6);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SupportFn R = random_symmetric(derive_seed(9, s));
    CHECK(area(curvature_image(R)) <= area(R) * (1.0 + 1e-12));
  }
}

TEST_CASE("Steiner symmetral of an ellipse via its quadratic form") {
  const double a = 1.6, b = 0.9, ang = 0.5;
  const double c = std::cos(ang), s = std::sin(ang);
  // A = R diag(1/a^2, 1/b^2) R^T
  const double p = c * c / (a * a) + s * s / (b * b);
  const double q = c * s * (1.0 / (a * a) - 1.0 / (b * b));
  const double r = s * s / (a * a) + c * c / (b * b);
  const double alpha = p - q * q / r;
  const oracle::Fn expect = [&](double t) {
    return std::sqrt(std::cos(t) * std::cos(t) / alpha + std::sin(t) * std::sin(t) / r);
  };
  const SupportFn S = steiner_symmetrize(ellipse(256, a, b, ang), 0.0);
  CHECK(oracle::sup_diff(oracle::vec(S.samples()), oracle::sample(expect, 256)) < 1e-6);
}

TEST_CASE("Steiner symmetrization preserves area and produces mirror symmetry") {
  const SupportFn K = body(wobble);
  for (double axis : {0.0, 0.4, 1.3}) {
    const SupportFn S = steiner_symmetrize(K, axis);
    CHECK(area(S) == doctest::Approx(area(K)).epsilon(1e-8));
    const auto c = spectral::analyze(S.samples());
    for (double t : {0.2, 1.0, 2.5}) {
      CHECK(spectral::evaluate(c, 2.0 * axis - t) == doctest::Approx(spectral::evaluate(c, t)).epsilon(1e-8));
    }
    CHECK(bp_ratio(S) <= bp_ratio(K) * (1.0 + 1e-9));
    CHECK(sup(steiner_symmetrize(S, axis), S) < 1e-7);
  }
}

TEST_CASE("SL(2) normalization of an ellipse is the unit disk") {
  const NormalizedBody nb = sl2_normalize(ellipse(256, 1.7, 1.0 / 1.7, 0.9));
  CHECK(sup(nb.body, disk(256)) < 1e-6);
  CHECK(nb.witness.map().det() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nb.perimeter == doctest::Approx(2.0 * kPi).epsilon(1e-10));
}

TEST_CASE("property: normalized perimeter is minimal among SL(2) images") {
  const SupportFn K = random_symmetric(77);
  const NormalizedBody nb = sl2_normalize(K);
  CHECK(area(nb.body) == doctest::Approx(kPi).epsilon(1e-10));
  const double scale = std::sqrt(kPi / area(K));
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LinearMap2 m = SL2Map::stretch_rotation(1.0 + 0.3 * u(gen), kPi * u(gen)).map();
    CHECK(perimeter(scaled(apply_linear_map(K, m), scale)) >= nb.perimeter * (1.0 - 1e-10));
  }
}

TEST_CASE("Banach-Mazur distance: ellipses and brute force") {
  const BMCertificate ce = banach_mazur_to_disk(ellipse(256, 2.0, 0.6, 0.2));
  CHECK(ce.distance == doctest::Approx(1.0).epsilon(1e-4));
  const SupportFn K = body(wobble);
  const BMCertificate ck = banach_mazur_to_disk(K);
  const double brute = oracle::banach_mazur(oracle::polygon(wobble, 2000), 100);
  CHECK(ck.distance == doctest::Approx(brute).epsilon(1e-4));
  CHECK(ck.distance <= brute * (1.0 + 1e-6));
  const auto r = radii_after_map(K, ck.witness);
  CHECK(r[0] / r[1] == doctest::Approx(ck.distance).epsilon(1e-8));
}

TEST_CASE("property: Banach-Mazur bounds and SL(2) invariance") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const SupportFn K = random_symmetric(derive_seed(31, s));
    const double d = banach_mazur_to_disk(K).distance;
    CHECK(d >= 1.0);
    CHECK(d <= std::sqrt(2.0) + 1e-9);
    CHECK(d <= pinching_to_bm_bound(K) * (1.0 + 1e-6));
    const LinearMap2 m = SL2Map::stretch_rotation(1.5, 0.3 * static_cast<double>(s)).map();
    CHECK(banach_mazur_to_disk(apply_linear_map(K, m)).distance == doctest::Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("Lutwak identity on random bodies") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SupportFn K = random_symmetric(derive_seed(44, s));
    CHECK(lutwak_identity_check(K) < 1e-5 * centroid_body(K).max_value());
  }
  CHECK(lutwak_identity_check(ellipse(256, 1.3, 0.9)) < 1e-9);
}

TEST_CASE("symmetric-only operators reject asymmetric bodies") {
  const SupportFn K = make_support_fn(oracle::sample([](double t) { return 2.0 + 0.1 * std::cos(t); }, 64), false);
  CHECK(kind_of([&] { centroid_body(K); }) == ErrorKind::AsymmetricData);
  CHECK(kind_of([&] { curvature_image(K); }) == ErrorKind::AsymmetricData);
  CHECK(kind_of([&] { banach_mazur_to_disk(K); }) == ErrorKind::AsymmetricData);
  CHECK(kind_of([&] { sl2_normalize(K); }) == ErrorKind::AsymmetricData);
  CHECK(kind_of([&] { lutwak_identity_check(K); }) == ErrorKind::AsymmetricData);
  CHECK(projection_body(K).symmetric());
  CHECK(sup(polar_body(polar_body(K)), K) < 1e-6);
}
