#pragma once

// Reference computations that avoid the spectral machinery: bodies are given
// by closed-form support functions and discretized as dense polygons cut out
// by their support lines.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using Vec = std::array<double, 2>;
using Fn = std::function<double(double)>;
using Polygon = std::vector<Vec>;

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> sample(const Fn& h, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = h(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
  return v;
}

inline Fn ellipse_h(double a, double b, double angle = 0.0) {
  return [=](double t) {
    const double c = std::cos(t - angle), s = std::sin(t - angle);
    return std::sqrt(a * a * c * c + b * b * s * s);
  };
}

// Vertices where consecutive support lines x.u(t_i) = h(t_i) meet.
inline Polygon polygon(const Fn& h, std::size_t m = 20000) {
  Polygon p(m);
  const double dt = 2.0 * kPi / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t0 = dt * static_cast<double>(i), t1 = t0 + dt;
    const double h0 = h(t0), h1 = h(t1);
    const double det = std::sin(dt);
    p[i] = {(h0 * std::sin(t1) - h1 * std::sin(t0)) / det, (h1 * std::cos(t0) - h0 * std::cos(t1)) / det};
  }
  return p;
}

inline double cross(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

inline double area(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

inline double perimeter(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec& a = p[i];
    const Vec& b = p[(i + 1) % p.size()];
    s += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return s;
}

inline double support(const Polygon& p, double t) {
  const double c = std::cos(t), s = std::sin(t);
  double m = -std::numeric_limits<double>::infinity();
  for (const Vec& v : p) m = std::max(m, v[0] * c + v[1] * s);
  return m;
}

// Integral of |x.u| over the polygon, exact on each fan triangle (0, p_i, p_{i+1}).
inline double abs_moment(const Polygon& p, double t) {
  const double c = std::cos(t), s = std::sin(t);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec& a = p[i];
    const Vec& b = p[(i + 1) % p.size()];
    const double A = 0.5 * std::abs(cross(a, b));
    const double l1 = a[0] * c + a[1] * s;
    const double l2 = b[0] * c + b[1] * s;
    if (l1 * l2 >= 0.0) {
      total += A * std::abs(l1 + l2) / 3.0;
    } else {
      total += A / 3.0 * (l1 * l1 + l2 * l2) / std::abs(l1 - l2);
    }
  }
  return total;
}

// Distance from the origin to the boundary along direction t.
inline double radial(const Polygon& p, double t) {
  const Vec d{std::cos(t), std::sin(t)};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec& a = p[i];
    const Vec& b = p[(i + 1) % p.size()];
    const Vec e{b[0] - a[0], b[1] - a[1]};
    const double den = cross(d, e);
    if (den == 0.0) continue;
    const double r = cross(a, e) / den;
    const double s = cross(a, d) / den;
    if (r > 0.0 && s >= 0.0 && s <= 1.0) return r;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline Polygon map(const Polygon& p, double a, double b, double c, double d) {
  Polygon q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = {a * p[i][0] + b * p[i][1], c * p[i][0] + d * p[i][1]};
  return q;
}

// Outer radius over vertices and inner radius over edge lines.
inline std::array<double, 2> radii(const Polygon& p) {
  double rin = std::numeric_limits<double>::infinity(), rout = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec& a = p[i];
    const Vec& b = p[(i + 1) % p.size()];
    rout = std::max(rout, std::hypot(a[0], a[1]));
    rin = std::min(rin, std::abs(cross(a, b)) / std::hypot(b[0] - a[0], b[1] - a[1]));
  }
  return {rin, rout};
}

// Grid search over diag(s, 1/s) R(phi) with two zoom passes.
inline double banach_mazur(const Polygon& p, std::size_t grid = 200, double s_max = 4.0) {
  auto objective = [&](double ls, double phi) {
    const double s = std::exp(ls), c = std::cos(phi), sn = std::sin(phi);
    const auto r = radii(map(p, s * c, -s * sn, sn / s, c / s));
    return r[1] / r[0];
  };
  double best = std::numeric_limits<double>::infinity(), bl = 0.0, bp = 0.0;
  double l_lo = 0.0, l_hi = std::log(s_max), p_lo = 0.0, p_hi = kPi;
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t i = 0; i <= grid; ++i) {
      for (std::size_t j = 0; j < grid; ++j) {
        const double ls = l_lo + (l_hi - l_lo) * static_cast<double>(i) / static_cast<double>(grid);
        const double ph = p_lo + (p_hi - p_lo) * static_cast<double>(j) / static_cast<double>(grid);
        const double v = objective(ls, ph);
        if (v < best) {
          best = v;
          bl = ls;
          bp = ph;
        }
      }
    }
    const double wl = 4.0 * (l_hi - l_lo) / static_cast<double>(grid);
    const double wp = 4.0 * (p_hi - p_lo) / static_cast<double>(grid);
    l_lo = std::max(0.0, bl - wl);
    l_hi = bl + wl;
    p_lo = bp - wp;
    p_hi = bp + wp;
  }
  return best;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename Span>
std::vector<double> vec(const Span& s) {
  return std::vector<double>(s.begin(), s.end());
}

}  // namespace oracle
