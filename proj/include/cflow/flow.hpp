#pragma once

// Explicit RK4 integration of dh/dt = -1 / (h^2 S) with per-row monitors.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cflow/affine_ops.hpp"
#include "cflow/geom_core.hpp"

namespace cflow {

struct FlowRow {
  std::size_t step = 0;
  double t = 0.0;
  double area = 0.0;
  double polar_area = 0.0;
  double bp_ratio = 0.0;          // V(Gamma K) / V(K)
  double ratio_rhs = 0.0;         // closed form of d/dt bp_ratio
  double min_S = 0.0;
  double min_ca2 = 0.0;           // G / h^2
  double max_ca2 = 0.0;
  double min_ca3 = 0.0;           // G / h^3
  double max_ca3 = 0.0;
  double d_bm = 0.0;              // NaN when not monitored
  double r_minus = 0.0;           // radii of the d_bm witness position
  double r_plus = 0.0;
  double harnack = 0.0;           // sqrt(t) * min(G / h^2)
  double norm_dev = 0.0;          // sup |h_norm - 1|, NaN when not monitored
  double symmetry_defect = 0.0;   // max antipodal mismatch / max h
  double spectral_tail = 0.0;
};

class FlowTrace;

struct FlowConfig {
  std::size_t n = 0;  // 0 keeps the grid of the initial body
  double cfl = 0.1;
  double t_stop_area = 1e-3;
  std::size_t renormalize_every = 25;
  std::size_t max_steps = 5'000'000;
  std::size_t record_every = 25;
  std::optional<double> t_end;
  bool monitor_bm = true;
  bool monitor_normalized = true;
  bool monitor_affine = true;  // bp_ratio and ratio_rhs
  bool keep_snapshots = true;
  // Called for every recorded row with the current body.
  std::function<void(const FlowRow&, const SupportFn&)> observer;

  void validate() const;
};

enum class StopReason { AreaThreshold, TimeReached, MaxSteps };
std::string to_string(StopReason r);

class FlowTrace {
 public:
  std::vector<FlowRow> rows;
  // Per-row snapshots of h and of h_{K*} (empty unless keep_snapshots).
  std::vector<std::vector<double>> h_snapshots;
  std::vector<std::vector<double>> polar_snapshots;
  std::vector<double> h0;
  double extinction_time = 0.0;
  StopReason stop = StopReason::MaxSteps;
  std::size_t steps = 0;
  std::optional<double> eta_crossing_time;  // first t with d_bm < 1.5^{1/4}
  bool symmetric = true;

  SupportFn body(std::size_t row) const;
  SupportFn final_body() const { return body(rows.size() - 1); }
};

// Raised on ConvexityLost / StepUnderflow; carries the trace up to the failure.
class FlowFailure : public GeomError {
 public:
  FlowFailure(ErrorKind kind, const std::string& msg, FlowTrace partial, double t)
      : GeomError(kind, msg), trace_(std::move(partial)), t_(t) {}
  const FlowTrace& trace() const { return trace_; }
  double time() const { return t_; }

 private:
  FlowTrace trace_;
  double t_;
};

GridFn flow_speed(const SupportFn& h);

FlowTrace flow_run(const SupportFn& h0, const FlowConfig& cfg);

// Least-squares fit of V^2 against t over the last decade of area decay.
double estimate_extinction_time(const std::vector<FlowRow>& rows);

// Area-pi rescaling followed by sl2_normalize.
NormalizedBody normalized_view(const SupportFn& h, const OptimizerOptions& opt = {});
double distance_to_unit_disk(const SupportFn& h);

struct ConservationReport {
  double max_area_law_deviation = 0.0;  // |dV/dt + 2V*| / (2V*)
  double min_ca2_max_decrease = 0.0;    // relative
  bool min_ca2_monotone = true;
  double polar_law_deviation = 0.0;     // relative, 3 sample angles
  double bp_ratio_max_increase = 0.0;
  bool bp_ratio_monotone = true;
  double ratio_derivative_deviation = 0.0;
  std::size_t ratio_derivative_samples = 0;
};

ConservationReport conservation_checks(const FlowTrace& trace);

struct HarnackReport {
  double harnack_max_decrease = 0.0;  // relative, per direction
  bool harnack_monotone = true;
  double sandwich_min = 0.0;          // (T - t) * min G/h^3 over the final half
  double sandwich_max = 0.0;          // (T - t) * max G/h^3 over the final half
  double shrink_violation = 0.0;      // max (h_t - h_0) / max h_0
  double displacement_violation = 0.0;  // max h_0 / (h_t (1 + 2t G/h^3)) - 1
  double extinction_sandwich_violation = 0.0;  // relative
};

HarnackReport harnack_and_bounds_monitor(const FlowTrace& trace);

// Nonuniform five-point derivative at the interior index i.
double lagrange_derivative(const std::vector<double>& t, const std::vector<double>& f, std::size_t i);

}  // namespace cflow
