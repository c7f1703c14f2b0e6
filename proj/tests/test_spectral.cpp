#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cflow/spectral.hpp"

using namespace cflow;

namespace {

std::vector<double> random_samples(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

}  // namespace

TEST_CASE("analyze and synthesize are inverse on random samples") {
  for (std::size_t n : {16u, 64u, 250u}) {
    const auto v = random_samples(n, static_cast<unsigned>(n));
    const auto c = spectral::analyze(v);
    CHECK(c.degree() == n / 2);
    CHECK(oracle::sup_diff(spectral::synthesize(c, n), v) < 1e-13);
  }
}

TEST_CASE("coefficients of a known trigonometric polynomial") {
  const auto v = oracle::sample([](double t) { return 0.5 + 2.0 * std::cos(3 * t) - 0.25 * std::sin(5 * t); }, 32);
  const auto c = spectral::analyze(v);
  CHECK(c.a[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.a[3] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.b[5] == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(std::abs(c.a[5]) < 1e-14);
  CHECK(std::abs(c.b[3]) < 1e-14);
}

TEST_CASE("spectral derivatives against closed forms") {
  const std::size_t n = 64;
  const auto f = oracle::sample([](double t) { return std::cos(3 * t) + std::sin(5 * t); }, n);
  const auto d1 = oracle::sample([](double t) { return -3 * std::sin(3 * t) + 5 * std::cos(5 * t); }, n);
  const auto d2 = oracle::sample([](double t) { return -9 * std::cos(3 * t) - 25 * std::sin(5 * t); }, n);
  const auto d3 = oracle::sample([](double t) { return 27 * std::sin(3 * t) - 125 * std::cos(5 * t); }, n);
  CHECK(oracle::sup_diff(spectral::derivative(f, 1), d1) < 1e-12);
  CHECK(oracle::sup_diff(spectral::derivative(f, 2), d2) < 1e-11);
  CHECK(oracle::sup_diff(spectral::derivative(f, 3), d3) < 1e-10);
}

TEST_CASE("Nyquist mode: odd derivatives vanish, even derivatives scale") {
  const std::size_t n = 16;
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = (j % 2 == 0) ? 1.0 : -1.0;  // cos(8t)
  for (double x : spectral::derivative(v, 1)) CHECK(std::abs(x) < 1e-13);
  const auto d2 = spectral::derivative(v, 2);
  for (std::size_t j = 0; j < n; ++j) CHECK(d2[j] == doctest::Approx(-64.0 * v[j]).epsilon(1e-13));
}

TEST_CASE("resampling reproduces band-limited functions on the new grid") {
  auto g = [](double t) { return 1.0 + 0.3 * std::cos(2 * t) - 0.1 * std::sin(6 * t); };
  const auto up = spectral::resample(oracle::sample(g, 32), 96);
  CHECK(oracle::sup_diff(up, oracle::sample(g, 96)) < 1e-14);
  const auto down = spectral::resample(oracle::sample(g, 96), 16);
  CHECK(oracle::sup_diff(down, oracle::sample(g, 16)) < 1e-14);
}

TEST_CASE("truncate and even_part") {
  auto g = [](double t) { return std::cos(t) + std::cos(2 * t) + std::sin(7 * t); };
  const auto v = oracle::sample(g, 32);
  const auto tr = spectral::truncate(v, 2);
  CHECK(oracle::sup_diff(tr, oracle::sample([](double t) { return std::cos(t) + std::cos(2 * t); }, 32)) < 1e-14);
  const auto ev = spectral::even_part(v);
  CHECK(oracle::sup_diff(ev, oracle::sample([](double t) { return std::cos(2 * t); }, 32)) < 1e-14);
}

TEST_CASE("abs-cos multiplier against direct quadrature") {
  // integral of |cos t| cos(k t) over the circle, midpoint rule on a fine grid.
  const int m = 200000;
  for (std::size_t k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * oracle::kPi * (i + 0.5) / m;
      s += std::abs(std::cos(t)) * std::cos(static_cast<double>(k) * t);
    }
    s *= 2.0 * oracle::kPi / m;
    CHECK(spectral::abs_cos_multiplier(k) == doctest::Approx(s).epsilon(1e-8).scale(1.0));
  }
  const auto ones = spectral::abs_cos_convolve(std::vector<double>(32, 1.0));
  for (double x : ones) CHECK(x == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("abs-cos convolution of a shifted mode") {
  const std::size_t n = 64;
  const auto f = oracle::sample([](double t) { return std::cos(2 * (t - 0.4)); }, n);
  const auto g = spectral::abs_cos_convolve(f);
  const double lam = spectral::abs_cos_multiplier(2);
  CHECK(lam == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(oracle::sup_diff(g, oracle::sample([&](double t) { return lam * std::cos(2 * (t - 0.4)); }, n)) < 1e-13);
}

TEST_CASE("pointwise evaluation and jets between nodes") {
  auto g = [](double t) { return 2.0 + std::cos(3 * t) - 0.5 * std::sin(4 * t); };
  const auto c = spectral::analyze(oracle::sample(g, 32));
  for (double t : {0.1, 1.234, 5.9}) {
    CHECK(spectral::evaluate(c, t) == doctest::Approx(g(t)).epsilon(1e-13));
    const auto j = spectral::evaluate_jet(c, t);
    CHECK(j.df == doctest::Approx(-3 * std::sin(3 * t) - 2 * std::cos(4 * t)).epsilon(1e-12));
    CHECK(j.d2f == doctest::Approx(-9 * std::cos(3 * t) + 8 * std::sin(4 * t)).epsilon(1e-12));
  }
  const std::vector<double> ts{0.3, 2.0};
  const auto many = spectral::evaluate_many(c, ts);
  CHECK(many[1] == doctest::Approx(g(2.0)).epsilon(1e-13));
}

TEST_CASE("tail fraction") {
  const auto v = oracle::sample([](double t) { return 5.0 + std::cos(2 * t) + std::cos(10 * t); }, 64);
  CHECK(spectral::tail_fraction(v, 4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(spectral::tail_fraction(v, 10) < 1e-20);
}
