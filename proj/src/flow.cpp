#include "cflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geom_detail.hpp"

namespace cflow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Stage {
  std::vector<double> speed;
  double min_h2s2 = 0.0;
};

// Speed -1/(h^2 S) of raw samples; throws on loss of convexity.
Stage stage_speed(const std::vector<double>& y, double t) {
  const std::size_t n = y.size();
  std::vector<double> s = spectral::derivative(y, 2);
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, v);
  Stage st;
  st.speed.resize(n);
  st.min_h2s2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double S = s[j] + y[j];
    if (!(S > kConvexityFloor * ymax) || !(y[j] > 0.0)) {
      std::ostringstream os;
      os << "curvature lost positivity at t=" << t << " (S[" << j << "] = " << S << ")";
      throw GeomError(ErrorKind::ConvexityLost, os.str());
    }
    const double h2 = y[j] * y[j];
    st.speed[j] = -1.0 / (h2 * S);
    st.min_h2s2 = std::min(st.min_h2s2, h2 * S * S);
  }
  return st;
}

double antipodal_defect(std::span<const double> h) {
  const std::size_t half = h.size() / 2;
  double d = 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) m = std::max(m, h[j]);
  for (std::size_t j = 0; j < half; ++j) d = std::max(d, std::abs(h[j] - h[j + half]));
  return d / m;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 0.5)) throw GeomError(ErrorKind::InvalidArgument, "cfl must lie in (0, 0.5]");
  if (!(t_stop_area > 0.0)) throw GeomError(ErrorKind::InvalidArgument, "t_stop_area must be positive");
  if (renormalize_every == 0 || record_every == 0 || max_steps == 0) {
    throw GeomError(ErrorKind::InvalidArgument, "cadences and max_steps must be positive");
  }
  if (t_end && !(*t_end > 0.0)) throw GeomError(ErrorKind::InvalidArgument, "t_end must be positive");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::AreaThreshold: return "area_threshold";
    case StopReason::TimeReached: return "time_reached";
    case StopReason::MaxSteps: return "max_steps";
  }
  return "unknown";
}

SupportFn FlowTrace::body(std::size_t row) const {
  if (row >= h_snapshots.size()) {
    throw GeomError(ErrorKind::InvalidArgument, "trace has no snapshot for this row");
  }
  return make_support_fn(h_snapshots[row], symmetric);
}

GridFn flow_speed(const SupportFn& h) {
  const auto s = h.curvature();
  std::vector<double> v(h.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = -1.0 / (h[j] * h[j] * s[j]);
  return GridFn(std::move(v));
}

double estimate_extinction_time(const std::vector<FlowRow>& rows) {
  if (rows.size() < 2) return kNaN;
  const double vfinal = rows.back().area;
  std::vector<const FlowRow*> use;
  for (const FlowRow& r : rows) {
    if (r.area <= 10.0 * vfinal) use.push_back(&r);
  }
  if (use.size() < 3) {
    use.clear();
    for (const FlowRow& r : rows) use.push_back(&r);
  }
  // V^2 = c (T - t): linear in t with root T.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double m = static_cast<double>(use.size());
  for (const FlowRow* r : use) {
    const double y = r->area * r->area;
    st += r->t;
    sy += y;
    stt += r->t * r->t;
    sty += r->t * y;
  }
  const double tm = st / m;
  const double ym = sy / m;
  const double slope = (sty - m * tm * ym) / (stt - m * tm * tm);
  const double intercept = ym - slope * tm;
  return -intercept / slope;
}

NormalizedBody normalized_view(const SupportFn& h, const OptimizerOptions& opt) {
  return sl2_normalize(scaled(h, std::sqrt(kPi / area(h))), opt);
}

double distance_to_unit_disk(const SupportFn& h) {
  double d = 0.0;
  for (double v : h.samples()) d = std::max(d, std::abs(v - 1.0));
  return d;
}

FlowTrace flow_run(const SupportFn& h0_in, const FlowConfig& cfg) {
  cfg.validate();
  if (!h0_in.symmetric()) {
    throw GeomError(ErrorKind::AsymmetricData, "flow_run requires an origin-symmetric body");
  }
  const SupportFn h0 = cfg.n == 0 ? h0_in : resampled(h0_in, cfg.n);
  const std::size_t n = h0.size();
  const double dtheta = kTwoPi / static_cast<double>(n);
  const std::size_t kmax = n / 3;

  FlowTrace trace;
  trace.h0.assign(h0.samples().begin(), h0.samples().end());
  trace.symmetric = true;

  std::optional<std::array<double, 2>> bm_chart;
  std::optional<std::array<double, 2>> norm_chart;
  const double eta = std::pow(1.5, 0.25);

  auto record = [&](const std::vector<double>& y, double t, std::size_t step, bool force_norm) {
    const SupportFn h = make_support_fn(y, true);
    FlowRow row;
    row.step = step;
    row.t = t;
    row.area = area(h);
    row.polar_area = polar_area(h);
    const auto s = h.curvature();
    row.min_S = h.min_curvature();
    row.min_ca2 = row.min_ca3 = std::numeric_limits<double>::infinity();
    row.max_ca2 = row.max_ca3 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double g = 1.0 / s[j];
      const double c2 = g / (h[j] * h[j]);
      const double c3 = c2 / h[j];
      row.min_ca2 = std::min(row.min_ca2, c2);
      row.max_ca2 = std::max(row.max_ca2, c2);
      row.min_ca3 = std::min(row.min_ca3, c3);
      row.max_ca3 = std::max(row.max_ca3, c3);
    }
    row.harnack = std::sqrt(t) * row.min_ca2;
    row.symmetry_defect = antipodal_defect(h.samples());
    row.spectral_tail = spectral_tail(h);

    std::vector<double> polar = symmetrize_samples(detail::polar_support_samples(h));
    if (cfg.monitor_affine) {
      std::vector<double> rho(polar);
      for (double& v : rho) v = 1.0 / v;
      const SupportFn gamma = centroid_body_from_radial(GridFn(std::move(rho)), row.area, true);
      row.bp_ratio = area(gamma) / row.area;
      const SupportFn pb = make_support_fn(polar, true);
      const double vstar = area(pb);
      const double vlambda = area(curvature_image(pb));
      row.ratio_rhs = 32.0 / (3.0 * row.area * row.area * vstar) * (vlambda - vstar);
    } else {
      row.bp_ratio = row.ratio_rhs = kNaN;
    }
    if (cfg.monitor_bm) {
      OptimizerOptions opt;
      opt.warm_start = bm_chart;
      if (bm_chart) {
        opt.restarts = 0;
        opt.simplex_tolerance = 1e-7;
      }
      const BMCertificate cert = banach_mazur_to_disk(h, opt);
      bm_chart = cert.chart;
      row.d_bm = cert.distance;
      row.r_minus = cert.inner_radius;
      row.r_plus = cert.outer_radius;
      if (!trace.eta_crossing_time && cert.distance < eta) trace.eta_crossing_time = t;
    } else {
      row.d_bm = row.r_minus = row.r_plus = kNaN;
    }
    if (cfg.monitor_normalized && (force_norm || step % cfg.renormalize_every == 0)) {
      OptimizerOptions opt;
      opt.warm_start = norm_chart;
      if (norm_chart) {
        opt.restarts = 0;
        opt.simplex_tolerance = 1e-7;
      }
      const NormalizedBody nb = normalized_view(h, opt);
      norm_chart = nb.chart;
      row.norm_dev = distance_to_unit_disk(nb.body);
    } else {
      row.norm_dev = kNaN;
    }
    trace.rows.push_back(row);
    if (cfg.keep_snapshots) {
      trace.h_snapshots.emplace_back(y);
      trace.polar_snapshots.emplace_back(std::move(polar));
    }
    if (cfg.observer) cfg.observer(row, h);
  };

  std::vector<double> y(trace.h0);
  double t = 0.0;
  std::size_t step = 0;
  auto fail = [&](ErrorKind kind, const std::string& msg) {
    trace.steps = step;
    trace.extinction_time = estimate_extinction_time(trace.rows);
    throw FlowFailure(kind, msg, std::move(trace), t);
  };

  record(y, t, 0, true);
  std::vector<double> stage(n);
  while (true) {
    if (step >= cfg.max_steps) {
      trace.stop = StopReason::MaxSteps;
      break;
    }
    try {
      const Stage k1 = stage_speed(y, t);
      double dt = cfg.cfl * dtheta * dtheta * k1.min_h2s2;
      bool last = false;
      if (cfg.t_end && t + dt >= *cfg.t_end) {
        dt = *cfg.t_end - t;
        last = true;
      }
      if (t + dt == t) fail(ErrorKind::StepUnderflow, "time step underflow at t=" + std::to_string(t));
      for (std::size_t j = 0; j < n; ++j) stage[j] = y[j] + 0.5 * dt * k1.speed[j];
      const Stage k2 = stage_speed(stage, t + 0.5 * dt);
      for (std::size_t j = 0; j < n; ++j) stage[j] = y[j] + 0.5 * dt * k2.speed[j];
      const Stage k3 = stage_speed(stage, t + 0.5 * dt);
      for (std::size_t j = 0; j < n; ++j) stage[j] = y[j] + dt * k3.speed[j];
      const Stage k4 = stage_speed(stage, t + dt);
      for (std::size_t j = 0; j < n; ++j) {
        y[j] += dt / 6.0 * (k1.speed[j] + 2.0 * k2.speed[j] + 2.0 * k3.speed[j] + k4.speed[j]);
      }
      // Dealiasing (2/3 rule) and projection onto even modes.
      y = spectral::filter(y, [kmax](std::size_t k) { return (k <= kmax && k % 2 == 0) ? 1.0 : 0.0; });
      t = last ? *cfg.t_end : t + dt;
      ++step;

      double a = 0.0;
      {
        const std::vector<double> d2 = spectral::derivative(y, 2);
        for (std::size_t j = 0; j < n; ++j) a += y[j] * (y[j] + d2[j]);
        a *= 0.5 * dtheta;
      }
      const bool done_area = a <= cfg.t_stop_area;
      if (done_area || last) {
        record(y, t, step, true);
        trace.stop = done_area ? StopReason::AreaThreshold : StopReason::TimeReached;
        break;
      }
      if (step % cfg.record_every == 0) record(y, t, step, false);
    } catch (const FlowFailure&) {
      throw;
    } catch (const GeomError& e) {
      if (e.kind() == ErrorKind::ConvexityLost || e.kind() == ErrorKind::NonConvex ||
          e.kind() == ErrorKind::NonPositive) {
        fail(ErrorKind::ConvexityLost, e.what());
      }
      throw;
    }
  }
  if (trace.rows.back().step != step) record(y, t, step, true);
  trace.steps = step;
  trace.extinction_time = estimate_extinction_time(trace.rows);
  return trace;
}

// ----------------------------------------------------------------- monitors

double lagrange_derivative(const std::vector<double>& t, const std::vector<double>& f, std::size_t i) {
  const std::size_t m = t.size();
  if (m < 5) throw GeomError(ErrorKind::InvalidArgument, "need at least five samples");
  std::size_t lo = i >= 2 ? i - 2 : 0;
  if (lo + 5 > m) lo = m - 5;
  const double x = t[i];
  double d = 0.0;
  for (std::size_t k = lo; k < lo + 5; ++k) {
    double denom = 1.0;
    for (std::size_t q = lo; q < lo + 5; ++q) {
      if (q != k) denom *= t[k] - t[q];
    }
    double num = 0.0;
    if (k == i) {
      // L_i'(x_i) = sum 1/(x_i - x_q)
      double sum = 0.0;
      for (std::size_t q = lo; q < lo + 5; ++q) {
        if (q != i) sum += 1.0 / (x - t[q]);
      }
      d += f[k] * sum;
      continue;
    }
    num = 1.0;
    for (std::size_t q = lo; q < lo + 5; ++q) {
      if (q != k && q != i) num *= x - t[q];
    }
    d += f[k] * num / denom;
  }
  return d;
}

ConservationReport conservation_checks(const FlowTrace& trace) {
  ConservationReport rep;
  const auto& rows = trace.rows;
  const std::size_t m = rows.size();
  if (m < 10) throw GeomError(ErrorKind::InvalidArgument, "conservation checks need at least 10 rows");
  std::vector<double> t(m), v(m), ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    t[i] = rows[i].t;
    v[i] = rows[i].area;
    ratio[i] = rows[i].bp_ratio;
  }
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const double dv = lagrange_derivative(t, v, i);
    const double target = -2.0 * rows[i].polar_area;
    rep.max_area_law_deviation = std::max(rep.max_area_law_deviation, std::abs(dv - target) / std::abs(target));
    if (std::isfinite(rows[i].ratio_rhs) && std::abs(rows[i].ratio_rhs) > 1e-6) {
      const double dr = lagrange_derivative(t, ratio, i);
      rep.ratio_derivative_deviation = std::max(
          rep.ratio_derivative_deviation, std::abs(dr - rows[i].ratio_rhs) / std::abs(rows[i].ratio_rhs));
      ++rep.ratio_derivative_samples;
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double dec = (rows[i].min_ca2 - rows[i + 1].min_ca2) / rows[i].min_ca2;
    rep.min_ca2_max_decrease = std::max(rep.min_ca2_max_decrease, dec);
    if (std::isfinite(ratio[i])) {
      rep.bp_ratio_max_increase = std::max(rep.bp_ratio_max_increase, ratio[i + 1] - ratio[i]);
    }
  }
  rep.min_ca2_monotone = rep.min_ca2_max_decrease <= 1e-8;
  rep.bp_ratio_monotone = rep.bp_ratio_max_increase <= 1e-8;

  if (trace.polar_snapshots.size() == m) {
    const std::size_t n = trace.polar_snapshots.front().size();
    const std::size_t probes[3] = {0, n / 8, n / 4 + 3};
    std::vector<std::vector<double>> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = trace.polar_snapshots[i];
      const std::vector<double> d2 = spectral::derivative(p, 2);
      rhs[i].resize(3);
      for (std::size_t q = 0; q < 3; ++q) {
        const std::size_t j = probes[q];
        rhs[i][q] = std::pow(p[j], 4) * (p[j] + d2[j]);
      }
    }
    for (std::size_t q = 0; q < 3; ++q) {
      std::vector<double> f(m);
      for (std::size_t i = 0; i < m; ++i) f[i] = trace.polar_snapshots[i][probes[q]];
      for (std::size_t i = 2; i + 2 < m; ++i) {
        const double d = lagrange_derivative(t, f, i);
        rep.polar_law_deviation = std::max(rep.polar_law_deviation, std::abs(d - rhs[i][q]) / std::abs(rhs[i][q]));
      }
    }
  }
  return rep;
}

HarnackReport harnack_and_bounds_monitor(const FlowTrace& trace) {
  HarnackReport rep;
  const auto& rows = trace.rows;
  const std::size_t m = rows.size();
  const double T = trace.extinction_time;
  const double tfinal = rows.back().t;
  rep.sandwich_min = std::numeric_limits<double>::infinity();
  rep.sandwich_max = 0.0;
  for (const FlowRow& r : rows) {
    if (r.t < 0.5 * tfinal || !(T - r.t > 0.0)) continue;
    rep.sandwich_min = std::min(rep.sandwich_min, (T - r.t) * r.min_ca3);
    rep.sandwich_max = std::max(rep.sandwich_max, (T - r.t) * r.max_ca3);
    if (std::isfinite(r.r_minus)) {
      const double lo = std::pow(r.r_minus, 4) / 4.0;
      const double hi = std::pow(r.r_plus, 4) / 4.0;
      const double gap = T - r.t;
      rep.extinction_sandwich_violation =
          std::max({rep.extinction_sandwich_violation, (lo - gap) / gap, (gap - hi) / gap});
    }
  }
  if (trace.h_snapshots.size() != m) return rep;

  const std::size_t n = trace.h0.size();
  const double h0max = *std::max_element(trace.h0.begin(), trace.h0.end());
  std::vector<double> prev;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& h = trace.h_snapshots[i];
    const std::vector<double> d2 = spectral::derivative(h, 2);
    std::vector<double> q(n);
    const double st = std::sqrt(rows[i].t);
    for (std::size_t j = 0; j < n; ++j) {
      const double g = 1.0 / (h[j] + d2[j]);
      q[j] = st * g / (h[j] * h[j]);
      rep.shrink_violation = std::max(rep.shrink_violation, (h[j] - trace.h0[j]) / h0max);
      const double bound = h[j] * (1.0 + 2.0 * rows[i].t * g / (h[j] * h[j] * h[j]));
      rep.displacement_violation = std::max(rep.displacement_violation, trace.h0[j] / bound - 1.0);
    }
    if (!prev.empty()) {
      for (std::size_t j = 0; j < n; ++j) {
        if (prev[j] > 0.0) rep.harnack_max_decrease = std::max(rep.harnack_max_decrease, (prev[j] - q[j]) / prev[j]);
      }
    }
    prev = std::move(q);
  }
  rep.harnack_monotone = rep.harnack_max_decrease <= 1e-6;
  return rep;
}

}  // namespace cflow
