#pragma once

// Planar convex bodies represented by samples of their support function on a
// uniform grid of outer-normal angles theta_j = 2*pi*j/n.

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cflow/errors.hpp"
#include "cflow/spectral.hpp"

namespace cflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative floor below which a curvature sample counts as non-positive.
inline constexpr double kConvexityFloor = 1e-10;
// Relative antipodal mismatch allowed for bodies flagged symmetric.
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr std::size_t kDefaultGrid = 256;

std::vector<double> grid_angles(std::size_t n);

// 2x2 matrix [[a, b], [c, d]] acting on column vectors.
class LinearMap2 {
 public:
  LinearMap2(double a, double b, double c, double d);

  static LinearMap2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static LinearMap2 rotation(double angle);
  static LinearMap2 diagonal(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }
  static LinearMap2 scaling(double s) { return {s, 0.0, 0.0, s}; }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double det() const { return a_ * d_ - b_ * c_; }
  double condition_number() const;

  LinearMap2 transpose() const { return {a_, c_, b_, d_}; }
  LinearMap2 inverse() const;
  LinearMap2 inverse_transpose() const { return inverse().transpose(); }

  std::array<double, 2> apply(double x, double y) const {
    return {a_ * x + b_ * y, c_ * x + d_ * y};
  }

  friend LinearMap2 operator*(const LinearMap2& lhs, const LinearMap2& rhs);

 private:
  double a_, b_, c_, d_;
};

// A LinearMap2 with unit determinant.
class SL2Map {
 public:
  explicit SL2Map(const LinearMap2& m);
  static SL2Map identity() { return SL2Map(LinearMap2::identity()); }
  // diag(s, 1/s) * R(angle)
  static SL2Map stretch_rotation(double s, double angle);
  const LinearMap2& map() const { return map_; }

 private:
  LinearMap2 map_;
};

// Immutable, validated support function samples. The curvature function
// S = h'' + h is computed once at construction.
class SupportFn {
 public:
  std::size_t size() const { return h_.size(); }
  std::span<const double> samples() const { return h_; }
  std::span<const double> curvature() const { return s_; }
  double operator[](std::size_t i) const { return h_[i]; }
  bool symmetric() const { return symmetric_; }
  double max_value() const;
  double min_value() const;
  double min_curvature() const;

 private:
  friend SupportFn make_support_fn(std::vector<double> samples, bool symmetric);
  SupportFn(std::vector<double> h, std::vector<double> s, bool symmetric)
      : h_(std::move(h)), s_(std::move(s)), symmetric_(symmetric) {}

  std::vector<double> h_;
  std::vector<double> s_;
  bool symmetric_ = false;
};

// Validating constructor. Throws GeomError with kind InvalidArgument (bad
// grid, non-finite data), NonPositive, AsymmetricData or NonConvex.
SupportFn make_support_fn(std::vector<double> samples, bool symmetric);

// Averages antipodal samples (exact projection onto symmetric data).
std::vector<double> symmetrize_samples(std::span<const double> samples);

// Curvature density S, optionally carrying a scalar weight; the density seen by
// solvers is weight * samples.
class CurvatureFn {
 public:
  CurvatureFn(std::vector<double> samples, double weight = 1.0);
  std::size_t size() const { return s_.size(); }
  std::span<const double> samples() const { return s_; }
  double weight() const { return weight_; }
  std::vector<double> density() const;
  // max(|sum S cos|, |sum S sin|) * 2pi/n of the density.
  double closure_defect() const;

 private:
  std::vector<double> s_;
  double weight_;
};

// Generic periodic field on the grid (radial functions, speeds, derivatives).
class GridFn {
 public:
  explicit GridFn(std::vector<double> values);
  std::size_t size() const { return v_.size(); }
  std::span<const double> values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }

 private:
  std::vector<double> v_;
};

// Constructors for reference bodies.
SupportFn disk(std::size_t n, double radius = 1.0);
// Image of the unit disk under R(angle) diag(a, b).
SupportFn ellipse(std::size_t n, double a, double b, double angle = 0.0);
SupportFn from_fourier(const spectral::Coefficients& c, std::size_t n, bool symmetric);
SupportFn scaled(const SupportFn& h, double factor);
SupportFn resampled(const SupportFn& h, std::size_t n);

CurvatureFn curvature_function(const SupportFn& h);
double area(const SupportFn& h);
double perimeter(const SupportFn& h);
SupportFn apply_linear_map(const SupportFn& h, const LinearMap2& map);
SupportFn rotate(const SupportFn& h, double angle);

// rho_K at the grid angles, computed as 1/h_{K*}.
GridFn radial_function(const SupportFn& h);
// rho_K at the grid angles from the boundary parametrization
// X(theta) = h u + h' u_perp, solving for the normal whose boundary point points
// in each grid direction. Independent of the polar-body route.
GridFn radial_function_boundary(const SupportFn& h);

// Boundary points X(theta) on an m-point grid (m >= n, zero-padded).
std::vector<std::array<double, 2>> boundary_points(const SupportFn& h, std::size_t m);

// Relative L2 energy in modes above n/4.
double spectral_tail(const SupportFn& h);

}  // namespace cflow
