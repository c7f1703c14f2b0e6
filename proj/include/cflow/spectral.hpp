#pragma once

// Fourier calculus for periodic samples on the uniform grid t_j = 2*pi*j/n.
//
// A sample vector of even length n is identified with its trigonometric
// interpolant
//
//   f(t) = a[0] + sum_{k=1}^{n/2} (a[k] cos kt + b[k] sin kt),   b[n/2] = 0,
//
// where the Nyquist mode carries only its cosine part. Odd derivatives zero the
// Nyquist mode; even derivatives keep it.

#include <cstddef>
#include <span>
#include <vector>

namespace cflow::spectral {

struct Coefficients {
  std::vector<double> a;  // a[0..K]
  std::vector<double> b;  // b[0..K], b[0] == 0
  std::size_t degree() const { return a.empty() ? 0 : a.size() - 1; }
};

struct Jet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

Coefficients analyze(std::span<const double> samples);

// Samples the series on a grid of m points. Modes above m/2 are dropped; a mode
// exactly at m/2 keeps its cosine part only.
std::vector<double> synthesize(const Coefficients& c, std::size_t m);

std::vector<double> derivative(std::span<const double> samples, int order);

// Trigonometric (zero-padded or truncated) resampling onto m points.
std::vector<double> resample(std::span<const double> samples, std::size_t m);

// Zeroes every mode k > kmax.
std::vector<double> truncate(std::span<const double> samples, std::size_t kmax);

// Zeroes every odd mode, i.e. projects onto antipodally even functions.
std::vector<double> even_part(std::span<const double> samples);

// Multiplies mode k (both cos and sin parts) by weight(k).
template <typename Weight>
std::vector<double> filter(std::span<const double> samples, Weight&& weight) {
  Coefficients c = analyze(samples);
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    const double w = weight(k);
    c.a[k] *= w;
    c.b[k] *= w;
  }
  return synthesize(c, samples.size());
}

// Returns g(psi) = integral over the circle of |cos(t - psi)| f(t) dt for the
// trigonometric interpolant f, evaluated exactly mode-by-mode.
std::vector<double> abs_cos_convolve(std::span<const double> samples);

// Multiplier of mode k in abs_cos_convolve.
double abs_cos_multiplier(std::size_t k);

double evaluate(const Coefficients& c, double t);
Jet evaluate_jet(const Coefficients& c, double t);
std::vector<double> evaluate_many(const Coefficients& c, std::span<const double> ts);

// Fraction of L2 energy (excluding the mean) carried by modes k > kmax.
double tail_fraction(std::span<const double> samples, std::size_t kmax);

}  // namespace cflow::spectral
