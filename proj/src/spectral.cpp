#include "cflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "cflow/errors.hpp"

namespace cflow::spectral {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not re-entrant; execution with new arrays is.
const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), cplx, flags);
  p.inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real.data(), flags);
  return cache.emplace(n, p).first->second;
}

void require_even(std::size_t n) {
  if (n < 2 || n % 2 != 0) {
    throw GeomError(ErrorKind::InvalidArgument, "spectral grid size must be even and >= 2");
  }
}

}  // namespace

Coefficients analyze(std::span<const double> samples) {
  const std::size_t n = samples.size();
  require_even(n);
  const std::size_t half = n / 2;
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out(half + 1);
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  Coefficients c;
  c.a.assign(half + 1, 0.0);
  c.b.assign(half + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  c.a[0] = out[0].real() * inv_n;
  for (std::size_t k = 1; k < half; ++k) {
    c.a[k] = 2.0 * out[k].real() * inv_n;
    c.b[k] = -2.0 * out[k].imag() * inv_n;
  }
  c.a[half] = out[half].real() * inv_n;
  return c;
}

std::vector<double> synthesize(const Coefficients& c, std::size_t m) {
  require_even(m);
  const std::size_t half = m / 2;
  std::vector<std::complex<double>> spec(half + 1, {0.0, 0.0});
  if (!c.a.empty()) spec[0] = {c.a[0], 0.0};
  const std::size_t top = std::min(c.degree(), half);
  for (std::size_t k = 1; k <= top; ++k) {
    if (k < half) {
      spec[k] = {0.5 * c.a[k], -0.5 * c.b[k]};
    } else {
      spec[k] = {c.a[k], 0.0};
    }
  }
  std::vector<double> out(m);
  fftw_execute_dft_c2r(plans_for(m).inverse, reinterpret_cast<fftw_complex*>(spec.data()),
                       out.data());
  return out;
}

std::vector<double> derivative(std::span<const double> samples, int order) {
  if (order < 0) throw GeomError(ErrorKind::InvalidArgument, "negative derivative order");
  Coefficients c = analyze(samples);
  for (int r = 0; r < order; ++r) {
    for (std::size_t k = 0; k < c.a.size(); ++k) {
      const double kd = static_cast<double>(k);
      const double a = c.a[k];
      c.a[k] = kd * c.b[k];
      c.b[k] = -kd * a;
    }
  }
  return synthesize(c, samples.size());
}

std::vector<double> resample(std::span<const double> samples, std::size_t m) {
  if (m == samples.size()) return {samples.begin(), samples.end()};
  Coefficients c = analyze(samples);
  return synthesize(c, m);
}

std::vector<double> truncate(std::span<const double> samples, std::size_t kmax) {
  return filter(samples, [kmax](std::size_t k) { return k <= kmax ? 1.0 : 0.0; });
}

std::vector<double> even_part(std::span<const double> samples) {
  return filter(samples, [](std::size_t k) { return k % 2 == 0 ? 1.0 : 0.0; });
}

double abs_cos_multiplier(std::size_t k) {
  if (k % 2 == 1) return 0.0;
  const double m = static_cast<double>(k / 2);
  const double sign = ((k / 2) % 2 == 0) ? -1.0 : 1.0;
  return 4.0 * sign / (4.0 * m * m - 1.0);
}

std::vector<double> abs_cos_convolve(std::span<const double> samples) {
  return filter(samples, [](std::size_t k) { return abs_cos_multiplier(k); });
}

double evaluate(const Coefficients& c, double t) {
  if (c.a.empty()) return 0.0;
  const std::complex<double> step = std::polar(1.0, t);
  std::complex<double> z = step;
  double sum = c.a[0];
  for (std::size_t k = 1; k < c.a.size(); ++k) {
    sum += c.a[k] * z.real() + c.b[k] * z.imag();
    z *= step;
  }
  return sum;
}

Jet evaluate_jet(const Coefficients& c, double t) {
  Jet j;
  if (c.a.empty()) return j;
  const std::complex<double> step = std::polar(1.0, t);
  std::complex<double> z = step;
  j.f = c.a[0];
  for (std::size_t k = 1; k < c.a.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double cs = z.real();
    const double sn = z.imag();
    const double v = c.a[k] * cs + c.b[k] * sn;
    j.f += v;
    j.df += kd * (c.b[k] * cs - c.a[k] * sn);
    j.d2f -= kd * kd * v;
    z *= step;
  }
  return j;
}

std::vector<double> evaluate_many(const Coefficients& c, std::span<const double> ts) {
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(evaluate(c, t));
  return out;
}

double tail_fraction(std::span<const double> samples, std::size_t kmax) {
  const Coefficients c = analyze(samples);
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t k = 1; k < c.a.size(); ++k) {
    const double e = c.a[k] * c.a[k] + c.b[k] * c.b[k];
    total += e;
    if (k > kmax) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace cflow::spectral
