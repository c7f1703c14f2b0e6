#include "cflow/affine_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geom_detail.hpp"
#include "optimize.hpp"

namespace cflow {
namespace {

void require_symmetric(const SupportFn& h, const char* op) {
  if (!h.symmetric()) {
    throw GeomError(ErrorKind::AsymmetricData, std::string(op) + " requires an origin-symmetric body");
  }
}

// Extremal value of the parabola through (-1, fm), (0, f0), (1, fp).
double parabolic_peak(double fm, double f0, double fp) {
  const double denom = fm - 2.0 * f0 + fp;
  if (denom == 0.0) return f0;
  const double off = 0.5 * (fm - fp) / denom;
  if (std::abs(off) > 1.0) return f0;
  return f0 - 0.25 * (fm - fp) * off;
}

LinearMap2 chart_map(const std::array<double, 2>& p) {
  const double r = std::hypot(p[0], p[1]);
  const double phi = r > 0.0 ? 0.5 * std::atan2(p[1], p[0]) : 0.0;
  return SL2Map::stretch_rotation(std::exp(r), phi).map();
}

// Penalized objective on the disk |p| <= ln s_max of the chart.
template <typename F>
double chart_objective(const F& f, double x, double y, double rmax) {
  const double r = std::hypot(x, y);
  if (r <= rmax) return f(std::array<double, 2>{x, y});
  const double k = rmax / r;
  return f(std::array<double, 2>{x * k, y * k}) * (1.0 + (r - rmax));
}

template <typename F>
std::array<double, 2> chart_search(const F& f, const OptimizerOptions& opt, double* best_value) {
  const double rmax = std::log(opt.s_max);
  std::array<double, 2> best{0.0, 0.0};
  double bv = f(best);
  double step = std::max(0.02, 2.0 * rmax / static_cast<double>(std::max<std::size_t>(opt.grid_s, 2) - 1));
  if (opt.warm_start) {
    best = *opt.warm_start;
    bv = chart_objective(f, best[0], best[1], rmax);
    step = 0.02;
  } else {
    for (std::size_t i = 0; i < opt.grid_s; ++i) {
      const double r = rmax * static_cast<double>(i) / static_cast<double>(opt.grid_s - 1);
      for (std::size_t j = 0; j < opt.grid_phi; ++j) {
        const double phi = kPi * static_cast<double>(j) / static_cast<double>(opt.grid_phi);
        const std::array<double, 2> p{r * std::cos(2.0 * phi), r * std::sin(2.0 * phi)};
        const double v = f(p);
        if (v < bv) { bv = v; best = p; }
      }
    }
  }
  auto g = [&](double x, double y) { return chart_objective(f, x, y, rmax); };
  for (int pass = 0; pass <= opt.restarts; ++pass) {
    const detail::MinimizeResult res =
        detail::nelder_mead_2d(g, best, {step, step}, opt.simplex_tolerance, opt.max_iterations);
    if (!std::isfinite(res.value)) {
      throw GeomError(ErrorKind::OptimizationFailed, "Nelder-Mead produced a non-finite value");
    }
    if (res.value <= bv) {
      bv = res.value;
      best = res.x;
    }
    step *= 0.25;
  }
  const double r = std::hypot(best[0], best[1]);
  if (r > rmax) {
    best[0] *= rmax / r;
    best[1] *= rmax / r;
    bv = f(best);
  }
  *best_value = bv;
  return best;
}

// Oversampled boundary data used by the radius evaluations.
struct FineBoundary {
  std::vector<double> h;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> c;
  std::vector<double> s;
};

FineBoundary fine_boundary(const SupportFn& h, std::size_t factor) {
  const std::size_t m = factor * h.size();
  FineBoundary fb;
  fb.h = spectral::resample(h.samples(), m);
  const std::vector<double> dh = spectral::derivative(fb.h, 1);
  fb.x.resize(m);
  fb.y.resize(m);
  fb.c.resize(m);
  fb.s.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(m);
    fb.c[i] = std::cos(t);
    fb.s[i] = std::sin(t);
    fb.x[i] = fb.h[i] * fb.c[i] - dh[i] * fb.s[i];
    fb.y[i] = fb.h[i] * fb.s[i] + dh[i] * fb.c[i];
  }
  return fb;
}

// Extremes on the coarse subgrid (every factor-th sample), then refinement of
// every near-extremal coarse candidate on the fine grid.
template <typename Value, typename Better>
double refined_extreme(std::size_t len, std::size_t factor, const Value& value, const Better& better) {
  const std::size_t coarse = len / factor;
  std::vector<double> cv(coarse);
  for (std::size_t i = 0; i < coarse; ++i) cv[i] = value(i * factor);
  double cbest = cv[0];
  for (double v : cv) cbest = better(v, cbest) ? v : cbest;
  double best = cbest;
  for (std::size_t i = 0; i < coarse; ++i) {
    const double l = cv[(i + coarse - 1) % coarse];
    const double r = cv[(i + 1) % coarse];
    if (better(l, cv[i]) || better(r, cv[i])) continue;
    if (std::abs(cv[i] - cbest) > 2e-2 * std::abs(cbest)) continue;
    std::size_t at = i * factor;
    double av = cv[i];
    for (std::size_t d = 1; d < factor; ++d) {
      const std::size_t up = (i * factor + d) % len;
      const std::size_t dn = (i * factor + len - d) % len;
      const double vu = value(up);
      const double vd = value(dn);
      if (better(vu, av)) { av = vu; at = up; }
      if (better(vd, av)) { av = vd; at = dn; }
    }
    const double pk = parabolic_peak(value((at + len - 1) % len), av, value((at + 1) % len));
    const double cand = better(pk, av) ? pk : av;
    if (better(cand, best)) best = cand;
  }
  return best;
}

std::array<double, 2> radii(const FineBoundary& fb, const LinearMap2& m) {
  const std::size_t len = fb.h.size();
  const std::size_t factor = 8;
  const LinearMap2 mit = m.inverse_transpose();
  // Squared quantities: their extremes sit at the same places.
  auto outer2 = [&](std::size_t i) {
    const auto p = m.apply(fb.x[i], fb.y[i]);
    return p[0] * p[0] + p[1] * p[1];
  };
  auto inner2 = [&](std::size_t i) {
    const auto q = mit.apply(fb.c[i], fb.s[i]);
    return fb.h[i] * fb.h[i] / (q[0] * q[0] + q[1] * q[1]);
  };
  const double rp2 = refined_extreme(len, factor, outer2, [](double a, double b) { return a > b; });
  const double rm2 = refined_extreme(len, factor, inner2, [](double a, double b) { return a < b; });
  return {std::sqrt(rp2), std::sqrt(rm2)};
}

}  // namespace

// --------------------------------------------------------------- polar

SupportFn polar_body(const SupportFn& h) {
  std::vector<double> v = detail::polar_support_samples(h);
  if (h.symmetric()) v = symmetrize_samples(v);
  return make_support_fn(std::move(v), h.symmetric());
}

double polar_area(const SupportFn& h) {
  double sum = 0.0;
  for (double v : h.samples()) sum += 1.0 / (v * v);
  return 0.5 * sum * kTwoPi / static_cast<double>(h.size());
}

// ---------------------------------------------------- centroid / projection

SupportFn centroid_body_from_radial(const GridFn& rho, double volume, bool symmetric) {
  std::vector<double> r3(rho.values().begin(), rho.values().end());
  for (double& v : r3) v = v * v * v;
  std::vector<double> g = spectral::abs_cos_convolve(r3);
  const double k = 1.0 / (3.0 * volume);
  for (double& v : g) v *= k;
  if (symmetric) g = symmetrize_samples(g);
  return make_support_fn(std::move(g), symmetric);
}

SupportFn centroid_body(const SupportFn& h) {
  require_symmetric(h, "centroid_body");
  return centroid_body_from_radial(radial_function(h), area(h), true);
}

SupportFn projection_body(const SupportFn& h) {
  std::vector<double> g = spectral::abs_cos_convolve(h.curvature());
  for (double& v : g) v *= 0.5;
  // Pi K is always origin-symmetric.
  return make_support_fn(symmetrize_samples(g), true);
}

double mixed_volume(const SupportFn& hK, const SupportFn& hL) {
  if (hK.size() != hL.size()) {
    std::ostringstream os;
    os << "grid sizes differ: " << hK.size() << " vs " << hL.size();
    throw GeomError(ErrorKind::GridMismatch, os.str());
  }
  const auto s = hK.curvature();
  const auto l = hL.samples();
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += l[j] * s[j];
  return 0.5 * sum * kTwoPi / static_cast<double>(s.size());
}

// ------------------------------------------------------------- Minkowski

MinkowskiSolution minkowski_solve(const CurvatureFn& f) {
  const std::vector<double> dens = f.density();
  const std::size_t n = dens.size();
  double fmax = 0.0;
  for (double v : dens) fmax = std::max(fmax, std::abs(v));
  spectral::Coefficients c = spectral::analyze(dens);
  const double a1 = c.a[1];
  const double b1 = c.b[1];
  if (std::hypot(a1, b1) > 1e-6 * fmax) {
    std::ostringstream os;
    os << "k=1 modes of the curvature density do not vanish: (" << a1 << ", " << b1 << ")";
    throw GeomError(ErrorKind::ClosureViolated, os.str());
  }
  c.a[1] = 0.0;
  c.b[1] = 0.0;
  // Odd modes at roundoff level (e.g. densities derived by differentiation)
  // count as symmetric data.
  double odd = 0.0;
  for (std::size_t k = 3; k < c.a.size(); k += 2) odd = std::max(odd, std::hypot(c.a[k], c.b[k]));
  const bool symmetric = odd <= 1e-10 * fmax;
  if (symmetric) {
    for (std::size_t k = 3; k < c.a.size(); k += 2) c.a[k] = c.b[k] = 0.0;
  }
  for (std::size_t k = 2; k < c.a.size(); ++k) {
    const double m = 1.0 / (1.0 - static_cast<double>(k * k));
    c.a[k] *= m;
    c.b[k] *= m;
  }
  std::vector<double> h = spectral::synthesize(c, n);

  if (symmetric) h = symmetrize_samples(h);

  MinkowskiSolution sol{[&] {
    try {
      return make_support_fn(std::move(h), symmetric);
    } catch (const GeomError& e) {
      throw GeomError(ErrorKind::NonConvexSolution, e.what());
    }
  }()};
  double res = 0.0;
  const auto s = sol.h.curvature();
  for (std::size_t j = 0; j < n; ++j) res = std::max(res, std::abs(s[j] - dens[j]));
  sol.residual = res;
  sol.translation_modes_removed = {a1, b1};
  return sol;
}

SupportFn curvature_image(const SupportFn& h) {
  require_symmetric(h, "curvature_image");
  const double w = area(h) / polar_area(h);
  std::vector<double> f(h.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = 1.0 / (h[j] * h[j] * h[j]);
  return minkowski_solve(CurvatureFn(std::move(f), w)).h;
}

// ------------------------------------------------------------------ Steiner

SupportFn steiner_symmetrize(const SupportFn& h, double axis_angle) {
  const std::size_t n = h.size();
  // Rotate so that the axis is the x-axis; chords are vertical.
  const spectral::Coefficients g =
      spectral::analyze(rotate(h, -axis_angle).samples());
  auto point = [&g](double t) {
    const spectral::Jet j = spectral::evaluate_jet(g, t);
    const double c = std::cos(t);
    const double s = std::sin(t);
    return std::array<double, 3>{j.f * c - j.df * s, j.f * s + j.df * c, j.f + j.d2f};
  };

  // Upper chain: normals in [0, pi], x decreasing. Lower chain: (pi, 2pi), x increasing.
  const std::size_t m = 4 * n;
  std::vector<double> xs(m + 1);
  std::vector<double> half_w(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = kPi * static_cast<double>(i) / static_cast<double>(m);
    const auto up = point(t);
    xs[i] = up[0];
    if (i == 0 || i == m) {
      half_w[i] = 0.0;
      continue;
    }
    double lo = kPi;
    double hi = kTwoPi;
    double th = kTwoPi - t;
    std::array<double, 3> low = point(th);
    for (int it = 0; it < 100; ++it) {
      const double f = low[0] - xs[i];
      if (f > 0.0) hi = th; else lo = th;
      const double fp = -low[2] * std::sin(th);
      double next = fp > 0.0 ? th - f / fp : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - th);
      th = next;
      low = point(th);
      if (step < 1e-15 || hi - lo < 1e-15) break;
    }
    half_w[i] = 0.5 * std::max(0.0, up[1] - low[1]);
  }

  // Points beyond the chain ends continue with the mirror image (s, -w/2).
  const auto mi = static_cast<std::ptrdiff_t>(m);
  auto support_at = [&](std::ptrdiff_t i, double c, double s) {
    double sign = 1.0;
    if (i < 0) { i = -i; sign = -1.0; }
    if (i > mi) { i = 2 * mi - i; sign = -1.0; }
    const auto k = static_cast<std::size_t>(i);
    return xs[k] * c + sign * half_w[k] * s;
  };

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double phi = std::fmod(kTwoPi * static_cast<double>(j) / static_cast<double>(n) - axis_angle, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi > kPi) phi = kTwoPi - phi;  // reflection in the axis
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    std::ptrdiff_t best = 0;
    double bv = support_at(0, c, s);
    for (std::ptrdiff_t i = 1; i <= mi; ++i) {
      const double v = support_at(i, c, s);
      if (v > bv) { bv = v; best = i; }
    }
    out[j] = std::max(bv, parabolic_peak(support_at(best - 1, c, s), bv, support_at(best + 1, c, s)));
  }
  out = spectral::truncate(out, n / 4);
  if (h.symmetric()) out = symmetrize_samples(out);
  return make_support_fn(std::move(out), h.symmetric());
}

// ------------------------------------------------------------ SL(2) searches

NormalizedBody sl2_normalize(const SupportFn& h, const OptimizerOptions& opt) {
  require_symmetric(h, "sl2_normalize");
  const std::size_t n = h.size();
  std::vector<double> c(n);
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    c[j] = std::cos(t);
    s[j] = std::sin(t);
  }
  const auto curv = h.curvature();
  const double dt = kTwoPi / static_cast<double>(n);
  // Perimeter of Phi K = integral of S |Phi u_perp|.
  auto length = [&](const std::array<double, 2>& p) {
    const LinearMap2 m = chart_map(p);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = m.apply(-s[j], c[j]);
      sum += curv[j] * std::hypot(v[0], v[1]);
    }
    return sum * dt;
  };
  double best_value = 0.0;
  const std::array<double, 2> p = chart_search(length, opt, &best_value);
  const LinearMap2 m = chart_map(p);
  const SupportFn mapped = apply_linear_map(h, m);
  const double k = std::sqrt(kPi / area(mapped));
  SupportFn body = scaled(mapped, k);
  const double per = perimeter(body);
  return NormalizedBody{std::move(body), SL2Map(m), k, per, p};
}

std::array<double, 2> radii_after_map(const SupportFn& h, const LinearMap2& map) {
  return radii(fine_boundary(h, 8), map);
}

BMCertificate banach_mazur_to_disk(const SupportFn& h, const OptimizerOptions& opt) {
  require_symmetric(h, "banach_mazur_to_disk");
  const FineBoundary fb = fine_boundary(h, 8);
  auto ratio = [&fb](const std::array<double, 2>& p) {
    const auto r = radii(fb, chart_map(p));
    return r[0] / r[1];
  };
  double best_value = 0.0;
  const std::array<double, 2> p = chart_search(ratio, opt, &best_value);
  BMCertificate cert;
  cert.witness = chart_map(p);
  const auto r = radii(fb, cert.witness);
  cert.outer_radius = r[0];
  cert.inner_radius = r[1];
  cert.distance = r[0] / r[1];
  cert.chart = p;
  return cert;
}

// -------------------------------------------------------- identity checks

double lutwak_identity_check(const SupportFn& h) {
  require_symmetric(h, "lutwak_identity_check");
  const SupportFn gamma = centroid_body_from_radial(radial_function_boundary(h), area(h), true);
  const SupportFn polar = polar_body(h);
  const SupportFn pil = projection_body(curvature_image(polar));
  const double k = 2.0 / (3.0 * area(polar));
  double err = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) err = std::max(err, std::abs(gamma[j] - k * pil[j]));
  return err;
}

double pinching_to_bm_bound(const SupportFn& h) {
  double qmin = std::numeric_limits<double>::infinity();
  double qmax = 0.0;
  const auto s = h.curvature();
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double q = h[j] * std::cbrt(s[j]);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  return std::pow(qmax / qmin, 1.5);
}

}  // namespace cflow
