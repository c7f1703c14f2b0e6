#include "cflow/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace cflow {
namespace {

double uniform_pm1(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

SupportFn blend_with_disk(const SupportFn& h, double lambda) {
  std::vector<double> v(h.samples().begin(), h.samples().end());
  for (double& x : v) x = (1.0 - lambda) + lambda * x;
  return make_support_fn(std::move(v), h.symmetric());
}

}  // namespace

void BodySpec::validate() const {
  if (mode_count < 0) throw GeomError(ErrorKind::InvalidArgument, "mode_count must be non-negative");
  if (!(decay > 1.0)) throw GeomError(ErrorKind::InvalidArgument, "decay must exceed 1");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw GeomError(ErrorKind::InvalidArgument, "amplitude must be finite and non-negative");
  }
  if (n < 16 || n % 2 != 0) throw GeomError(ErrorKind::InvalidArgument, "grid size must be even and >= 16");
  if (static_cast<std::size_t>(2 * mode_count) >= n / 2) {
    throw GeomError(ErrorKind::InvalidArgument, "mode_count too large for the grid");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SupportFn random_body(const BodySpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  std::mt19937_64 gen(spec.seed);
  const std::vector<double> th = grid_angles(n);
  std::vector<double> p(n, 0.0);   // perturbation of h
  std::vector<double> ps(n, 0.0);  // perturbation of S
  for (int m = 1; m <= spec.mode_count; ++m) {
    const int k = 2 * m;
    const double w = spec.amplitude * std::pow(spec.decay, -static_cast<double>(k));
    const double a = uniform_pm1(gen) * w;
    const double b = uniform_pm1(gen) * w;
    const double sk = 1.0 - static_cast<double>(k * k);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a * std::cos(k * th[j]) + b * std::sin(k * th[j]);
      p[j] += v;
      ps[j] += sk * v;
    }
  }
  // min S(c) = 1 + c min(ps) is concave in c; its root for S = 0.05 is explicit.
  const double pmin = *std::min_element(ps.begin(), ps.end());
  double c = 1.0;
  if (1.0 + pmin < 0.05) c = 0.95 / (-pmin) * (1.0 - 1e-12);
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) h[j] = 1.0 + c * p[j];
  return make_support_fn(symmetrize_samples(h), true);
}

double bp_ratio(const SupportFn& h) { return area(centroid_body(h)) / area(h); }

double bp_deficit(const SupportFn& h) { return bp_ratio(h) / kBPConstant - 1.0; }

double santalo_product(const SupportFn& h) { return area(h) * polar_area(h); }

double petty_projection_product(const SupportFn& h) {
  return area(h) * polar_area(projection_body(h));
}

double groemer_gap(const SupportFn& hK, const SupportFn& hL) {
  const double vkl = mixed_volume(hK, hL);
  const double vk = area(hK);
  const double vl = area(hL);
  const double lhs = vkl * vkl / (vk * vl) - 1.0;
  const double diam = 2.0 * hK.max_value();
  const double sk = 1.0 / std::sqrt(vk);
  const double sl = 1.0 / std::sqrt(vl);
  double dev = 0.0;
  for (std::size_t j = 0; j < hK.size(); ++j) dev = std::max(dev, std::abs(hK[j] * sk - hL[j] * sl));
  const double rhs = vk / (4.0 * diam * diam) * dev * dev;
  return lhs - rhs;
}

double ratio_derivative_rhs(const SupportFn& h) {
  const SupportFn polar = polar_body(h);
  const double v = area(h);
  const double vs = area(polar);
  return 32.0 / (3.0 * v * v * vs) * (area(curvature_image(polar)) - vs);
}

DeficitReport deficit_report(std::uint64_t id, const SupportFn& h, bool with_bm) {
  DeficitReport r;
  r.id = id;
  r.bp_deficit = bp_deficit(h);
  r.santalo_gap = 1.0 - santalo_product(h) / (kPi * kPi);
  r.petty_gap = 1.0 - petty_projection_product(h) / (0.25 * kPi * kPi);
  r.groemer_gap = groemer_gap(h, disk(h.size()));
  r.pinching_bound = pinching_to_bm_bound(h);
  r.d_bm = with_bm ? banach_mazur_to_disk(h).distance : std::numeric_limits<double>::quiet_NaN();
  return r;
}

// ------------------------------------------------------------------ fuzzing

bool FuzzReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckSummary& c) { return c.violations == 0; });
}

LinearMap2 random_gl_map(std::uint64_t seed, double max_condition) {
  std::mt19937_64 gen(seed);
  const double a = kPi * uniform01(gen);
  const double b = kPi * uniform01(gen);
  const double cond = 1.0 + (max_condition - 1.0) * uniform01(gen);
  const double scale = std::exp(std::log(2.0) * uniform_pm1(gen));
  const double r = std::sqrt(cond);
  return LinearMap2::rotation(a) * LinearMap2::diagonal(scale * r, scale / r) * LinearMap2::rotation(b);
}

FuzzReport fuzz_campaign(const FuzzOptions& opt) {
  std::vector<std::string> checks = opt.checks;
  if (checks.empty()) {
    for (const std::string& c : fuzz_check_names()) {
      if (c != "banach_mazur" || opt.with_bm) checks.push_back(c);
    }
  }
  for (const std::string& c : checks) {
    if (std::find(fuzz_check_names().begin(), fuzz_check_names().end(), c) == fuzz_check_names().end()) {
      throw GeomError(ErrorKind::InvalidArgument, "unknown fuzz check '" + c + "'");
    }
  }
  FuzzReport rep;
  rep.seed = opt.seed;
  rep.bodies = opt.count;
  std::map<std::string, CheckSummary> sums;
  for (const std::string& c : checks) {
    CheckSummary s;
    s.name = c;
    s.min_gap = std::numeric_limits<double>::infinity();
    sums.emplace(c, s);
  }
  auto wants = [&](const char* c) { return sums.count(c) != 0; };
  auto note = [&](const char* c, double gap, std::uint64_t seed) {
    CheckSummary& s = sums.at(c);
    ++s.count;
    if (gap < s.min_gap) {
      s.min_gap = gap;
      s.argmin_seed = seed;
    }
    if (!(gap >= -kGapTolerance)) ++s.violations;
  };

  for (std::size_t i = 0; i < opt.count; ++i) {
    const std::uint64_t seed = derive_seed(opt.seed, i);
    BodySpec spec = opt.body;
    spec.seed = seed;
    SupportFn K = random_body(spec);
    spec.seed = derive_seed(seed, 2);
    SupportFn L = random_body(spec);
    if (opt.random_maps) {
      K = apply_linear_map(K, random_gl_map(derive_seed(seed, 1), 4.0));
      L = apply_linear_map(L, random_gl_map(derive_seed(seed, 3), 4.0));
    }
    const double vk = area(K);
    if (wants("busemann_petty")) note("busemann_petty", bp_deficit(K), seed);
    if (wants("santalo")) note("santalo", 1.0 - santalo_product(K) / (kPi * kPi), seed);
    if (wants("petty")) note("petty", 1.0 - petty_projection_product(K) / (0.25 * kPi * kPi), seed);
    if (wants("minkowski")) {
      const double vkl = mixed_volume(K, L);
      note("minkowski", vkl * vkl / (vk * area(L)) - 1.0, seed);
    }
    if (wants("groemer")) note("groemer", groemer_gap(K, L), seed);
    if (wants("lambda")) note("lambda", 1.0 - area(curvature_image(K)) / vk, seed);
    if (wants("lutwak")) {
      const double scale = centroid_body(K).max_value();
      note("lutwak", opt.lutwak_tolerance - lutwak_identity_check(K) / scale, seed);
    }
    if (wants("banach_mazur")) {
      const double d = banach_mazur_to_disk(K).distance;
      const double gap = std::min(pinching_to_bm_bound(K) + 1e-3 - d, std::sqrt(2.0) + 1e-6 - d);
      note("banach_mazur", gap, seed);
    }
  }
  for (const std::string& c : checks) rep.checks.push_back(sums.at(c));
  return rep;
}

// ---------------------------------------------------------------- stability

StabilityResult stability_experiment(const StabilityOptions& opt) {
  if (opt.samples < 10) throw GeomError(ErrorKind::InvalidArgument, "stability experiment needs >= 10 samples");
  if (!(opt.eps_min > 0.0 && opt.eps_max > opt.eps_min)) {
    throw GeomError(ErrorKind::InvalidArgument, "invalid deficit range");
  }
  StabilityResult res;
  std::mt19937_64 gen(opt.seed);
  const std::size_t first = opt.include_disk ? 1 : 0;
  const std::size_t strata = opt.samples - first;
  const double la = std::log(opt.eps_min);
  const double lb = std::log(opt.eps_max);

  auto measure = [&](StabilitySample& s, const SupportFn& body) {
    s.eps = bp_deficit(body);
    const double d = banach_mazur_to_disk(body).distance;
    s.d_bm_minus_1 = d - 1.0;
    s.pinch_bound = pinching_to_bm_bound(body);
    if (s.d_bm_minus_1 <= 1e-12) {
      s.gamma_witness = 0.0;
    } else {
      s.gamma_witness = s.d_bm_minus_1 / std::pow(std::max(s.eps, 1e-300), 0.25);
    }
  };

  if (opt.include_disk) {
    StabilitySample s;
    s.seed = opt.seed;
    s.target_eps = 0.0;
    s.lambda = 0.0;
    measure(s, disk(opt.body.n));
    res.samples.push_back(s);
  }
  for (std::size_t i = 0; i < strata; ++i) {
    StabilitySample s;
    s.seed = derive_seed(opt.seed, i);
    const double u = uniform01(gen);
    s.target_eps = std::exp(la + (static_cast<double>(i) + u) / static_cast<double>(strata) * (lb - la));
    BodySpec spec = opt.body;
    spec.seed = s.seed;
    const SupportFn base = random_body(spec);
    const double full = bp_deficit(base);
    double lambda = 1.0;
    if (full < s.target_eps * (1.0 - opt.target_tolerance)) {
      s.reached = false;
      ++res.unreachable;
    } else {
      // The deficit grows like lambda^2 near the disk: secant steps in
      // (log lambda, log eps) inside a maintained bracket.
      double lo = 0.0, hi = 1.0;
      lambda = std::sqrt(s.target_eps / full);
      for (int it = 0; it < 100; ++it) {
        const double e = bp_deficit(blend_with_disk(base, lambda));
        if (std::abs(e / s.target_eps - 1.0) <= opt.target_tolerance) break;
        if (e < s.target_eps) lo = lambda; else hi = lambda;
        double next = e > 0.0 ? lambda * std::sqrt(s.target_eps / e) : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lambda = next;
      }
    }
    s.lambda = lambda;
    measure(s, blend_with_disk(base, lambda));
    res.samples.push_back(s);
  }

  res.decade_counts.assign(5, 0);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const StabilitySample& s : res.samples) {
    res.gamma = std::max(res.gamma, s.gamma_witness);
    res.max_eps = std::max(res.max_eps, s.eps);
    if (s.eps >= 1e-6 && s.eps <= 1e-1) {
      const auto dec = static_cast<std::size_t>(std::min(4.0, std::floor(std::log10(s.eps) + 6.0)));
      ++res.decade_counts[dec];
    }
    if (s.eps > 0.0 && s.eps <= opt.fit_max_eps && s.d_bm_minus_1 > 0.0 && s.target_eps > 0.0) {
      const double x = std::log(s.eps);
      const double y = std::log(s.d_bm_minus_1);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++res.fit_count;
    }
  }
  if (res.fit_count >= 2) {
    const double m = static_cast<double>(res.fit_count);
    res.slope = (sxy - sx * sy / m) / (sxx - sx * sx / m);
    res.intercept = (sy - res.slope * sx) / m;
  }
  return res;
}

}  // namespace cflow
