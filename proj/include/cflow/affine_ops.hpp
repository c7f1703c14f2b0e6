#pragma once

// Bodies and functionals attached to a convex body: polar, centroid,
// projection and curvature-image bodies, mixed volume, the planar Minkowski
// solver, Steiner symmetrization and the SL(2) searches.

#include <array>
#include <optional>

#include "cflow/geom_core.hpp"

namespace cflow {

SupportFn polar_body(const SupportFn& h);
// V(K*) = 1/2 * integral of h^-2.
double polar_area(const SupportFn& h);

// Gamma K from rho_K = 1/h_{K*}. Requires a symmetric body.
SupportFn centroid_body(const SupportFn& h);
// Gamma K from a given radial function and the area of K.
SupportFn centroid_body_from_radial(const GridFn& rho, double volume, bool symmetric);

SupportFn projection_body(const SupportFn& h);

// V(K, L) = 1/2 * integral of h_L dS_K. Throws GridMismatch.
double mixed_volume(const SupportFn& hK, const SupportFn& hL);

struct MinkowskiSolution {
  SupportFn h;
  double residual = 0.0;                                // sup |S_h - f|
  std::array<double, 2> translation_modes_removed{};   // (a1, b1) of f
};

// Solves h'' + h = f with the k = 1 modes of h set to zero. Throws
// ClosureViolated if the k = 1 amplitude of f exceeds 1e-6 * max |f|, and
// NonConvexSolution if the result is not a valid support function.
MinkowskiSolution minkowski_solve(const CurvatureFn& f);

// Lambda K: the body with curvature density (V(K)/V(K*)) h^-3.
SupportFn curvature_image(const SupportFn& h);

// Steiner symmetral about the line through the origin at axis_angle.
SupportFn steiner_symmetrize(const SupportFn& h, double axis_angle);

struct OptimizerOptions {
  std::size_t grid_s = 64;
  std::size_t grid_phi = 64;
  double s_max = 8.0;
  int max_iterations = 500;
  double simplex_tolerance = 1e-10;
  int restarts = 2;
  // Chart point ln(s) * (cos 2phi, sin 2phi); skips the coarse grid when set.
  std::optional<std::array<double, 2>> warm_start;
};

struct NormalizedBody {
  SupportFn body;        // area pi
  SL2Map witness;        // body = scale * witness(K)
  double scale = 1.0;
  double perimeter = 0.0;
  std::array<double, 2> chart{};
};

// Minimizes the perimeter of Phi K over Phi = diag(s, 1/s) R(phi).
NormalizedBody sl2_normalize(const SupportFn& h, const OptimizerOptions& opt = {});

struct BMCertificate {
  double distance = 1.0;
  LinearMap2 witness = LinearMap2::identity();
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  std::array<double, 2> chart{};
};

// Outer and inner radius of Phi K for a symmetric body, on an 8x oversampled
// boundary with local quadratic refinement.
std::array<double, 2> radii_after_map(const SupportFn& h, const LinearMap2& map);

BMCertificate banach_mazur_to_disk(const SupportFn& h, const OptimizerOptions& opt = {});

// sup |h_{Gamma K} - 2/(3 V(K*)) h_{Pi Lambda K*}|.
double lutwak_identity_check(const SupportFn& h);

// (max q / min q)^{3/2} with q = h S^{1/3}.
double pinching_to_bm_bound(const SupportFn& h);

}  // namespace cflow
