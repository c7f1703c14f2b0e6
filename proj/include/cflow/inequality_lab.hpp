#pragma once

// Deficit functionals, a seeded generator of symmetric bodies, fuzzing
// campaigns and the stability experiment.

#include <cstdint>
#include <string>
#include <vector>

#include "cflow/affine_ops.hpp"
#include "cflow/geom_core.hpp"

namespace cflow {

inline constexpr double kBPConstant = 16.0 / (9.0 * kPi * kPi);  // (4/(3 pi))^2
inline constexpr double kGapTolerance = 1e-9;

struct BodySpec {
  std::uint64_t seed = 0;
  int mode_count = 3;
  double decay = 1.3;
  double amplitude = 0.4;
  std::size_t n = kDefaultGrid;

  void validate() const;
};

// splitmix64 step, used to derive per-body seeds from a campaign seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// h = 1 + c * sum over even k of amplitude decay^-k (a_k cos k + b_k sin k),
// a, b uniform on [-1, 1], with c in [0, 1] the largest scale keeping min S >= 0.05.
SupportFn random_body(const BodySpec& spec);

double bp_ratio(const SupportFn& h);     // V(Gamma K) / V(K)
double bp_deficit(const SupportFn& h);   // bp_ratio / (4/(3 pi))^2 - 1
double santalo_product(const SupportFn& h);           // V(K) V(K*)
double petty_projection_product(const SupportFn& h);  // V(K) V((Pi K)*)
double groemer_gap(const SupportFn& hK, const SupportFn& hL);
double ratio_derivative_rhs(const SupportFn& h);

struct DeficitReport {
  std::uint64_t id = 0;
  double bp_deficit = 0.0;
  double santalo_gap = 0.0;   // (pi^2 - V V*) / pi^2
  double petty_gap = 0.0;     // ((pi/2)^2 - V V((Pi K)*)) / (pi/2)^2
  double groemer_gap = 0.0;   // against the unit disk
  double d_bm = 0.0;
  double pinching_bound = 0.0;
};

DeficitReport deficit_report(std::uint64_t id, const SupportFn& h, bool with_bm);

// ------------------------------------------------------------------ fuzzing

inline const std::vector<std::string>& fuzz_check_names() {
  static const std::vector<std::string> names = {
      "busemann_petty", "santalo", "petty", "minkowski", "groemer", "lambda", "lutwak", "banach_mazur"};
  return names;
}

struct FuzzOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  BodySpec body;             // seed field ignored
  bool random_maps = false;  // apply a GL(2) map with condition number <= 4
  bool with_bm = false;      // enables the banach_mazur check
  std::vector<std::string> checks;  // empty: every check except banach_mazur unless with_bm
  double lutwak_tolerance = 1e-5;
};

struct CheckSummary {
  std::string name;
  double min_gap = 0.0;
  std::uint64_t argmin_seed = 0;
  std::size_t count = 0;
  std::size_t violations = 0;
};

struct FuzzReport {
  std::uint64_t seed = 0;
  std::size_t bodies = 0;
  std::vector<CheckSummary> checks;
  bool ok() const;
};

// Random GL(2) map R(a) diag(s1, s2) R(b) with s1/s2 in [1, max_condition].
LinearMap2 random_gl_map(std::uint64_t seed, double max_condition);

FuzzReport fuzz_campaign(const FuzzOptions& opt);

// ---------------------------------------------------------------- stability

struct StabilityOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  BodySpec body;
  double eps_min = 1e-6;
  double eps_max = 1e-1;
  double fit_max_eps = 1e-2;
  double target_tolerance = 0.01;  // relative
  bool include_disk = true;        // sample 0 is the unit disk
};

struct StabilitySample {
  std::uint64_t seed = 0;
  double target_eps = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  double d_bm_minus_1 = 0.0;
  double pinch_bound = 0.0;
  double gamma_witness = 0.0;  // (d_bm - 1) / eps^{1/4}
  bool reached = true;
};

struct StabilityResult {
  std::vector<StabilitySample> samples;
  double gamma = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fit_count = 0;
  std::size_t unreachable = 0;
  double max_eps = 0.0;
  // Counts per decade [1e-6, 1e-5), ..., [1e-2, 1e-1].
  std::vector<std::size_t> decade_counts;
};

StabilityResult stability_experiment(const StabilityOptions& opt);

}  // namespace cflow
