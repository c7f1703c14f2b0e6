#include "cflow/geom_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geom_detail.hpp"

namespace cflow {

std::vector<double> grid_angles(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  return t;
}

// ---------------------------------------------------------------- LinearMap2

LinearMap2::LinearMap2(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw GeomError(ErrorKind::InvalidArgument, "linear map has non-finite entries");
  }
  if (std::abs(det()) <= 1e-12) {
    throw GeomError(ErrorKind::InvalidArgument, "linear map is singular (|det| <= 1e-12)");
  }
}

LinearMap2 LinearMap2::rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

LinearMap2 LinearMap2::inverse() const {
  const double dt = det();
  return {d_ / dt, -b_ / dt, -c_ / dt, a_ / dt};
}

double LinearMap2::condition_number() const {
  // Singular values of a 2x2 matrix from its Frobenius norm and determinant.
  const double fro2 = a_ * a_ + b_ * b_ + c_ * c_ + d_ * d_;
  const double dt = std::abs(det());
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * dt * dt));
  const double smax = std::sqrt(0.5 * (fro2 + disc));
  const double smin = dt / smax;
  return smax / smin;
}

LinearMap2 operator*(const LinearMap2& l, const LinearMap2& r) {
  return {l.a_ * r.a_ + l.b_ * r.c_, l.a_ * r.b_ + l.b_ * r.d_,
          l.c_ * r.a_ + l.d_ * r.c_, l.c_ * r.b_ + l.d_ * r.d_};
}

SL2Map::SL2Map(const LinearMap2& m) : map_(m) {
  if (std::abs(m.det() - 1.0) > 1e-10) {
    throw GeomError(ErrorKind::InvalidArgument, "SL(2) map must have unit determinant");
  }
}

SL2Map SL2Map::stretch_rotation(double s, double angle) {
  return SL2Map(LinearMap2::diagonal(s, 1.0 / s) * LinearMap2::rotation(angle));
}

// ----------------------------------------------------------------- SupportFn

double SupportFn::max_value() const { return *std::max_element(h_.begin(), h_.end()); }
double SupportFn::min_value() const { return *std::min_element(h_.begin(), h_.end()); }
double SupportFn::min_curvature() const { return *std::min_element(s_.begin(), s_.end()); }

std::vector<double> symmetrize_samples(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const std::size_t half = n / 2;
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.5 * (samples[j] + samples[(j + half) % n]);
  return out;
}

SupportFn make_support_fn(std::vector<double> samples, bool symmetric) {
  const std::size_t n = samples.size();
  if (n < 16 || n % 2 != 0) {
    throw GeomError(ErrorKind::InvalidArgument, "grid size must be even and >= 16");
  }
  double hmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = samples[j];
    if (!std::isfinite(v)) {
      throw GeomError(ErrorKind::InvalidArgument, "support samples must be finite");
    }
    if (v <= 0.0) {
      std::ostringstream os;
      os << "support sample h[" << j << "] = " << v << " is not positive";
      throw GeomError(ErrorKind::NonPositive, os.str());
    }
    hmax = std::max(hmax, v);
  }
  if (symmetric) {
    const std::size_t half = n / 2;
    for (std::size_t j = 0; j < half; ++j) {
      if (std::abs(samples[j] - samples[j + half]) > kSymmetryTolerance * hmax) {
        std::ostringstream os;
        os << "antipodal mismatch at j=" << j << ": " << samples[j] << " vs " << samples[j + half];
        throw GeomError(ErrorKind::AsymmetricData, os.str());
      }
    }
  }
  std::vector<double> s = spectral::derivative(samples, 2);
  for (std::size_t j = 0; j < n; ++j) {
    s[j] += samples[j];
    if (s[j] <= kConvexityFloor * hmax) {
      std::ostringstream os;
      os << "curvature S[" << j << "] = " << s[j] << " is not positive";
      throw GeomError(ErrorKind::NonConvex, os.str());
    }
  }
  return SupportFn(std::move(samples), std::move(s), symmetric);
}

// --------------------------------------------------------- CurvatureFn/GridFn

CurvatureFn::CurvatureFn(std::vector<double> samples, double weight)
    : s_(std::move(samples)), weight_(weight) {
  if (s_.size() < 16 || s_.size() % 2 != 0) {
    throw GeomError(ErrorKind::InvalidArgument, "grid size must be even and >= 16");
  }
  if (!std::isfinite(weight_) || weight_ <= 0.0) {
    throw GeomError(ErrorKind::InvalidArgument, "curvature weight must be positive");
  }
  for (double v : s_) {
    if (!std::isfinite(v)) throw GeomError(ErrorKind::InvalidArgument, "curvature samples must be finite");
    if (v <= 0.0) throw GeomError(ErrorKind::NonPositive, "curvature samples must be positive");
  }
}

std::vector<double> CurvatureFn::density() const {
  std::vector<double> d(s_);
  for (double& v : d) v *= weight_;
  return d;
}

double CurvatureFn::closure_defect() const {
  const std::size_t n = s_.size();
  double sc = 0.0;
  double ss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    sc += s_[j] * std::cos(t);
    ss += s_[j] * std::sin(t);
  }
  const double w = weight_ * kTwoPi / static_cast<double>(n);
  return std::max(std::abs(sc), std::abs(ss)) * w;
}

GridFn::GridFn(std::vector<double> values) : v_(std::move(values)) {
  for (double v : v_) {
    if (!std::isfinite(v)) throw GeomError(ErrorKind::InvalidArgument, "grid values must be finite");
  }
}

// ---------------------------------------------------------------- builders

SupportFn disk(std::size_t n, double radius) {
  return make_support_fn(std::vector<double>(n, radius), true);
}

SupportFn ellipse(std::size_t n, double a, double b, double angle) {
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n) - angle;
    const double c = std::cos(t);
    const double s = std::sin(t);
    h[j] = std::sqrt(a * a * c * c + b * b * s * s);
  }
  return make_support_fn(symmetrize_samples(h), true);
}

SupportFn from_fourier(const spectral::Coefficients& c, std::size_t n, bool symmetric) {
  std::vector<double> h = spectral::synthesize(c, n);
  if (symmetric) h = symmetrize_samples(h);
  return make_support_fn(std::move(h), symmetric);
}

SupportFn scaled(const SupportFn& h, double factor) {
  if (!(factor > 0.0)) throw GeomError(ErrorKind::InvalidArgument, "scale factor must be positive");
  std::vector<double> v(h.samples().begin(), h.samples().end());
  for (double& x : v) x *= factor;
  return make_support_fn(std::move(v), h.symmetric());
}

SupportFn resampled(const SupportFn& h, std::size_t n) {
  if (n == h.size()) return h;
  std::vector<double> v = spectral::resample(h.samples(), n);
  if (h.symmetric()) v = symmetrize_samples(v);
  return make_support_fn(std::move(v), h.symmetric());
}

// -------------------------------------------------------------- functionals

CurvatureFn curvature_function(const SupportFn& h) {
  return CurvatureFn(std::vector<double>(h.curvature().begin(), h.curvature().end()), 1.0);
}

double area(const SupportFn& h) {
  const auto hs = h.samples();
  const auto ss = h.curvature();
  double sum = 0.0;
  for (std::size_t j = 0; j < hs.size(); ++j) sum += hs[j] * ss[j];
  return 0.5 * sum * kTwoPi / static_cast<double>(hs.size());
}

double perimeter(const SupportFn& h) {
  double sum = 0.0;
  for (double v : h.samples()) sum += v;
  return sum * kTwoPi / static_cast<double>(h.size());
}

SupportFn apply_linear_map(const SupportFn& h, const LinearMap2& m) {
  const std::size_t n = h.size();
  const spectral::Coefficients coeffs = spectral::analyze(h.samples());
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    const double u1 = std::cos(t);
    const double u2 = std::sin(t);
    // Phi^T u
    const double w1 = m.a() * u1 + m.c() * u2;
    const double w2 = m.b() * u1 + m.d() * u2;
    const double len = std::hypot(w1, w2);
    out[j] = len * spectral::evaluate(coeffs, std::atan2(w2, w1));
  }
  if (h.symmetric()) out = symmetrize_samples(out);
  return make_support_fn(std::move(out), h.symmetric());
}

SupportFn rotate(const SupportFn& h, double angle) {
  return apply_linear_map(h, LinearMap2::rotation(angle));
}

std::vector<std::array<double, 2>> boundary_points(const SupportFn& h, std::size_t m) {
  const std::vector<double> hs = spectral::resample(h.samples(), m);
  const std::vector<double> dh = spectral::derivative(hs, 1);
  std::vector<std::array<double, 2>> pts(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
    const double c = std::cos(t);
    const double s = std::sin(t);
    pts[j] = {hs[j] * c - dh[j] * s, hs[j] * s + dh[j] * c};
  }
  return pts;
}

GridFn radial_function(const SupportFn& h) {
  std::vector<double> polar = detail::polar_support_samples(h);
  for (double& v : polar) v = 1.0 / v;
  return GridFn(std::move(polar));
}

GridFn radial_function_boundary(const SupportFn& h) {
  const std::size_t n = h.size();
  const spectral::Coefficients coeffs = spectral::analyze(h.samples());
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double psi = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    // Direction of X(theta) is theta + atan2(h', h), strictly increasing in theta;
    // the root of F(theta) = theta + atan2(h', h) - psi lies in psi +- pi/2.
    double lo = psi - 0.5 * kPi;
    double hi = psi + 0.5 * kPi;
    spectral::Jet jet = spectral::evaluate_jet(coeffs, psi);
    double theta = psi - std::atan2(jet.df, jet.f);
    for (int it = 0; it < 100; ++it) {
      jet = spectral::evaluate_jet(coeffs, theta);
      const double f = theta + std::atan2(jet.df, jet.f) - psi;
      if (f > 0.0) hi = theta; else lo = theta;
      const double r2 = jet.f * jet.f + jet.df * jet.df;
      const double fp = jet.f * (jet.f + jet.d2f) / r2;
      double next = theta - f / fp;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - theta);
      theta = next;
      if (step < 1e-15 || hi - lo < 1e-15) break;
    }
    jet = spectral::evaluate_jet(coeffs, theta);
    rho[j] = std::hypot(jet.f, jet.df);
  }
  return GridFn(std::move(rho));
}

double spectral_tail(const SupportFn& h) {
  return spectral::tail_fraction(h.samples(), h.size() / 4);
}

// ------------------------------------------------------------------- detail

namespace detail {

std::vector<double> polar_support_samples(const SupportFn& h, std::size_t oversample) {
  const std::size_t n = h.size();
  const std::size_t m = oversample * n;
  const spectral::Coefficients coeffs = spectral::analyze(h.samples());
  const std::vector<double> fine = spectral::synthesize(coeffs, m);
  const double dphi = kTwoPi / static_cast<double>(m);

  // h_{K*}(psi) = max over normals theta of cos(theta - psi) / h(theta):
  // the boundary of K* is the curve u_theta / h(theta).
  auto score = [&](std::ptrdiff_t idx, double psi) {
    const std::size_t k = static_cast<std::size_t>((idx % static_cast<std::ptrdiff_t>(m) +
                                                    static_cast<std::ptrdiff_t>(m)) %
                                                   static_cast<std::ptrdiff_t>(m));
    return std::cos(static_cast<double>(k) * dphi - psi) / fine[k];
  };

  std::vector<double> out(n);
  std::ptrdiff_t best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double psi = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    if (j == 0) {
      double bv = score(0, psi);
      for (std::size_t k = 1; k < m; ++k) {
        const double v = score(static_cast<std::ptrdiff_t>(k), psi);
        if (v > bv) { bv = v; best = static_cast<std::ptrdiff_t>(k); }
      }
    } else {
      // The linear functional is unimodal along the convex curve.
      while (score(best + 1, psi) > score(best, psi)) ++best;
      while (score(best - 1, psi) > score(best, psi)) --best;
    }
    const double g0 = score(best, psi);
    const double gm = score(best - 1, psi);
    const double gp = score(best + 1, psi);
    const double denom = gm - 2.0 * g0 + gp;
    double offset = denom < 0.0 ? 0.5 * (gm - gp) / denom : 0.0;
    offset = std::clamp(offset, -1.0, 1.0);
    double theta = (static_cast<double>(best) + offset) * dphi;

    // Newton polish of d/dtheta [cos(theta - psi) / h(theta)] = 0.
    for (int it = 0; it < 6; ++it) {
      const spectral::Jet jet = spectral::evaluate_jet(coeffs, theta);
      const double c = std::cos(theta - psi);
      const double s = std::sin(theta - psi);
      const double num = -s * jet.f - c * jet.df;
      const double g1 = num / (jet.f * jet.f);
      const double g2 = (-c * (jet.f + jet.d2f) * jet.f - 2.0 * jet.df * num) /
                        (jet.f * jet.f * jet.f);
      if (!(g2 < 0.0)) break;
      const double step = std::clamp(-g1 / g2, -dphi, dphi);
      theta += step;
      if (std::abs(step) < 1e-15) break;
    }
    const double refined = std::cos(theta - psi) / spectral::evaluate(coeffs, theta);
    out[j] = std::max(refined, g0);
  }
  return out;
}

}  // namespace detail
}  // namespace cflow
