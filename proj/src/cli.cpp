#include "cflow/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "cflow/affine_ops.hpp"
#include "cflow/body_io.hpp"
#include "cflow/flow.hpp"
#include "cflow/inequality_lab.hpp"

#ifndef CFLOW_VERSION
#define CFLOW_VERSION "unknown"
#endif

namespace cflow::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collects the files of one output directory in a hidden sibling and moves
// them into place only on commit.
class Staging {
 public:
  explicit Staging(const std::string& dir) {
    fs::path p = fs::absolute(fs::path(dir)).lexically_normal();
    if (p.filename().empty()) p = p.parent_path();
    final_ = p;
    std::random_device rd;
    tmp_ = p.parent_path() / ("." + p.filename().string() + ".staging-" + std::to_string(rd()));
    std::error_code ec;
    fs::create_directories(tmp_, ec);
    if (ec) throw GeomError(ErrorKind::Io, "cannot create '" + tmp_.string() + "': " + ec.message());
    display_ = fs::path(dir).lexically_normal();
    if (display_.filename().empty()) display_ = display_.parent_path();
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }

  void write(const std::string& name, const std::string& content) {
    io::atomic_write(tmp_ / name, content);
    names_.push_back(name);
  }

  std::vector<std::string> paths() const {
    std::vector<std::string> out;
    for (const auto& n : names_) out.push_back((display_ / n).string());
    return out;
  }

  void commit(io::RunManifest m) {
    m.outputs = paths();
    write("manifest.json", m.to_json().dump(2) + "\n");
    std::error_code ec;
    fs::create_directories(final_, ec);
    if (ec) throw GeomError(ErrorKind::Io, "cannot create '" + final_.string() + "': " + ec.message());
    for (const auto& n : names_) {
      fs::rename(tmp_ / n, final_ / n, ec);
      if (ec) throw GeomError(ErrorKind::Io, "cannot move '" + n + "' into '" + final_.string() + "'");
    }
  }

 private:
  fs::path final_;
  fs::path tmp_;
  fs::path display_;
  std::vector<std::string> names_;
};

struct Input {
  std::string bytes;
  json value;
};

Input load_json(const std::string& path) {
  Input in;
  in.bytes = io::read_file(path);
  in.value = io::parse_json(in.bytes, path);
  return in;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config values must be scalars or arrays of scalars");
}

// Fills options that were not given on the command line from a JSON object.
// Top-level keys name options of the active subcommand; a key equal to a
// subcommand name holds an object of options for that subcommand only.
void apply_config(CLI::App& app, CLI::App* sub, const json& cfg) {
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  auto apply = [&](const std::string& key, const json& v) {
    if (key == "config") throw UsageError("config files cannot nest");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) return;
    if (v.is_array()) {
      for (const json& e : v) opt->add_result(config_value(e));
    } else {
      opt->add_result(config_value(v));
    }
    opt->run_callback();
  };
  for (const auto& [key, v] : cfg.items()) {
    const bool is_sub = app.get_subcommand_no_throw(key) != nullptr;
    if (is_sub) {
      if (!v.is_object()) throw UsageError("config section '" + key + "' must be an object");
      if (key != sub->get_name()) continue;
      for (const auto& [k2, v2] : v.items()) apply(k2, v2);
    }
  }
  for (const auto& [key, v] : cfg.items()) {
    if (app.get_subcommand_no_throw(key) == nullptr) apply(key, v);
  }
}

io::RunManifest manifest(const std::vector<std::string>& args, json config, const std::string& input,
                         double seconds) {
  io::RunManifest m;
  m.command_line = "centroflow";
  for (const auto& a : args) m.command_line += " " + a;
  m.config = std::move(config);
  m.input_hash = input.empty() ? std::string() : io::sha256_hex(input);
  m.wall_time = seconds;
  m.version = CFLOW_VERSION;
  return m;
}

json linear_map_json(const LinearMap2& m) { return json::array({m.a(), m.b(), m.c(), m.d()}); }

SupportFn maybe_resample(const SupportFn& h, std::size_t n) {
  return (n == 0 || n == h.size()) ? h : resampled(h, n);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ options

struct FlowArgs {
  std::string body;
  std::size_t n = 0;
  double stop_area = 1e-3;
  std::optional<double> t_end;
  double cfl = 0.1;
  std::size_t record_every = 25;
  std::size_t max_steps = 5'000'000;
  std::string frames;
  std::string out;
};

struct OpArgs {
  std::string operation;
  std::string body;
  std::size_t n = 0;
  double axis = 0.0;
  double tol = 1e-10;
  std::string out;
};

struct FuzzArgs {
  std::size_t seeds = 1000;
  std::uint64_t seed = 0;
  std::size_t n = kDefaultGrid;
  std::vector<std::string> checks;
  bool maps = false;
  bool with_bm = false;
  double tol = 1e-5;
  std::string out;
};

struct StabilityArgs {
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  std::size_t n = kDefaultGrid;
  double eps_min = 1e-6;
  double eps_max = 1e-1;
  double tol = 0.01;
  std::string out;
};

struct MinkowskiArgs {
  std::string curvature;
  std::size_t n = 0;
  std::string out;
};

// ----------------------------------------------------------------- commands

int cmd_flow(const FlowArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Input in = load_json(a.body);
  const SupportFn h0 = io::body_from_json(in.value);

  FlowConfig cfg;
  cfg.n = a.n;
  cfg.cfl = a.cfl;
  cfg.t_stop_area = a.stop_area;
  cfg.t_end = a.t_end;
  cfg.record_every = a.record_every;
  cfg.max_steps = a.max_steps;

  std::optional<Staging> frames;
  std::size_t frame_index = 0;
  std::optional<std::array<double, 2>> chart;
  if (!a.frames.empty()) {
    frames.emplace(a.frames);
    cfg.observer = [&](const FlowRow&, const SupportFn& h) {
      OptimizerOptions opt;
      opt.warm_start = chart;
      if (chart) opt.restarts = 0;
      const NormalizedBody nb = normalized_view(h, opt);
      chart = nb.chart;
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06zu.svg", frame_index++);
      frames->write(name, io::svg_frame(nb.body));
    };
  }

  std::optional<Staging> dir;
  if (!a.out.empty()) dir.emplace(a.out);

  const FlowTrace trace = flow_run(h0, cfg);
  const FlowRow& last = trace.rows.back();

  json summary;
  summary["stop"] = to_string(trace.stop);
  summary["steps"] = trace.steps;
  summary["rows"] = trace.rows.size();
  summary["extinction_time"] = trace.extinction_time;
  summary["eta_crossing_time"] = trace.eta_crossing_time ? json(*trace.eta_crossing_time) : json(nullptr);
  summary["final"] = {{"t", last.t},         {"area", last.area},   {"bp_ratio", last.bp_ratio},
                      {"d_bm", last.d_bm},   {"norm_dev", last.norm_dev}, {"min_S", last.min_S}};
  if (trace.rows.size() >= 10) {
    const ConservationReport c = conservation_checks(trace);
    summary["conservation"] = {{"max_area_law_deviation", c.max_area_law_deviation},
                               {"min_ca2_monotone", c.min_ca2_monotone},
                               {"polar_law_deviation", c.polar_law_deviation},
                               {"bp_ratio_max_increase", c.bp_ratio_max_increase},
                               {"bp_ratio_monotone", c.bp_ratio_monotone},
                               {"ratio_derivative_deviation", c.ratio_derivative_deviation},
                               {"ratio_derivative_samples", c.ratio_derivative_samples}};
    const HarnackReport hr = harnack_and_bounds_monitor(trace);
    summary["harnack"] = {{"harnack_max_decrease", hr.harnack_max_decrease},
                          {"harnack_monotone", hr.harnack_monotone},
                          {"sandwich_min", hr.sandwich_min},
                          {"sandwich_max", hr.sandwich_max},
                          {"shrink_violation", hr.shrink_violation},
                          {"displacement_violation", hr.displacement_violation},
                          {"extinction_sandwich_violation", hr.extinction_sandwich_violation}};
  }

  json config = {{"n", trace.h0.size()},        {"cfl", a.cfl},
                 {"stop_area", a.stop_area},    {"t_end", a.t_end ? json(*a.t_end) : json(nullptr)},
                 {"record_every", a.record_every}, {"max_steps", a.max_steps},
                 {"body", a.body},              {"frames", a.frames.empty() ? json(nullptr) : json(a.frames)}};
  const double secs = seconds_since(t0);
  if (dir) {
    dir->write("trace.csv", io::trace_csv(trace));
    dir->write("summary.json", summary.dump(2) + "\n");
  }
  if (frames) frames->commit(manifest(args, config, in.bytes, secs));
  if (dir) dir->commit(manifest(args, config, in.bytes, secs));
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_op(const OpArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Input in = load_json(a.body);
  const SupportFn h = maybe_resample(io::body_from_json(in.value), a.n);

  OptimizerOptions opt;
  opt.simplex_tolerance = a.tol;

  json result;
  auto body_result = [&](const SupportFn& b) {
    result = io::body_to_json(b);
    result["area"] = area(b);
  };
  const std::string& op = a.operation;
  if (op == "polar") {
    body_result(polar_body(h));
  } else if (op == "centroid") {
    body_result(centroid_body(h));
  } else if (op == "proj") {
    body_result(projection_body(h));
  } else if (op == "lambda") {
    body_result(curvature_image(h));
  } else if (op == "steiner") {
    body_result(steiner_symmetrize(h, a.axis));
    result["axis"] = a.axis;
  } else if (op == "normalize") {
    const NormalizedBody nb = sl2_normalize(h, opt);
    body_result(nb.body);
    result["witness"] = linear_map_json(nb.witness.map());
    result["scale"] = nb.scale;
    result["perimeter"] = nb.perimeter;
  } else if (op == "bm") {
    const BMCertificate c = banach_mazur_to_disk(h, opt);
    result = {{"distance", c.distance},
              {"witness", linear_map_json(c.witness)},
              {"inner_radius", c.inner_radius},
              {"outer_radius", c.outer_radius}};
  } else {  // deficits
    const DeficitReport r = deficit_report(0, h, true);
    result = {{"bp_ratio", bp_ratio(h)},
              {"bp_deficit", r.bp_deficit},
              {"santalo_product", santalo_product(h)},
              {"santalo_gap", r.santalo_gap},
              {"petty_gap", r.petty_gap},
              {"groemer_gap", r.groemer_gap},
              {"d_bm", r.d_bm},
              {"pinching_bound", r.pinching_bound},
              {"lutwak_residual", lutwak_identity_check(h)}};
  }
  result["operation"] = op;

  if (a.out.empty()) {
    out << result.dump(2) << "\n";
    return kExitOk;
  }
  Staging dir(a.out);
  dir.write("result.json", result.dump(2) + "\n");
  json config = {{"operation", op}, {"body", a.body}, {"n", h.size()}, {"axis", a.axis}, {"tol", a.tol}};
  dir.commit(manifest(args, config, in.bytes, seconds_since(t0)));
  out << "wrote " << dir.paths().front() << "\n";
  return kExitOk;
}

int cmd_fuzz(const FuzzArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  FuzzOptions opt;
  opt.count = a.seeds;
  opt.seed = a.seed;
  opt.body.n = a.n;
  opt.checks = a.checks;
  opt.random_maps = a.maps;
  opt.with_bm = a.with_bm;
  opt.lutwak_tolerance = a.tol;
  const FuzzReport rep = fuzz_campaign(opt);
  const json report = io::fuzz_report_json(rep);

  for (const CheckSummary& c : rep.checks) {
    out << c.name << ": min_gap=" << io::format_double(c.min_gap) << " violations=" << c.violations
        << " (seed " << c.argmin_seed << ")\n";
  }
  if (!a.out.empty()) {
    Staging dir(a.out);
    dir.write("fuzz_report.json", report.dump(2) + "\n");
    json config = {{"seeds", a.seeds}, {"seed", a.seed},   {"n", a.n},  {"checks", a.checks},
                   {"maps", a.maps},   {"with_bm", a.with_bm}, {"tol", a.tol}};
    dir.commit(manifest(args, config, "", seconds_since(t0)));
  }
  return rep.ok() ? kExitOk : kExitViolation;
}

int cmd_stability(const StabilityArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  StabilityOptions opt;
  opt.samples = a.samples;
  opt.seed = a.seed;
  opt.body.n = a.n;
  opt.eps_min = a.eps_min;
  opt.eps_max = a.eps_max;
  opt.target_tolerance = a.tol;
  const StabilityResult res = stability_experiment(opt);

  bool ok = std::isfinite(res.gamma);
  for (const StabilitySample& s : res.samples) {
    if (s.d_bm_minus_1 > res.gamma * std::pow(s.eps, 0.25) * (1.0 + 1e-12) + 1e-15) ok = false;
  }
  const json summary = io::stability_summary_json(res);
  out << "gamma=" << io::format_double(res.gamma) << " slope=" << io::format_double(res.slope)
      << " fit_count=" << res.fit_count << " unreachable=" << res.unreachable << "\n";
  if (!a.out.empty()) {
    Staging dir(a.out);
    dir.write("scatter.csv", io::scatter_csv(res));
    dir.write("stability.json", summary.dump(2) + "\n");
    json config = {{"samples", a.samples}, {"seed", a.seed},       {"n", a.n},
                   {"eps_min", a.eps_min}, {"eps_max", a.eps_max}, {"tol", a.tol}};
    dir.commit(manifest(args, config, "", seconds_since(t0)));
  }
  return ok ? kExitOk : kExitViolation;
}

int cmd_minkowski(const MinkowskiArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Input in = load_json(a.curvature);
  CurvatureFn f = io::curvature_from_json(in.value);
  if (a.n != 0 && a.n != f.size()) {
    f = CurvatureFn(spectral::resample(f.samples(), a.n), f.weight());
  }
  const MinkowskiSolution sol = minkowski_solve(f);
  json result = io::body_to_json(sol.h);
  result["area"] = area(sol.h);
  result["residual"] = sol.residual;
  result["translation_modes_removed"] = sol.translation_modes_removed;
  if (a.out.empty()) {
    out << result.dump(2) << "\n";
    return kExitOk;
  }
  Staging dir(a.out);
  dir.write("result.json", result.dump(2) + "\n");
  json config = {{"curvature", a.curvature}, {"n", f.size()}};
  dir.commit(manifest(args, config, in.bytes, seconds_since(t0)));
  out << "wrote " << dir.paths().front() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Centro-affine curvature flow and affine inequality laboratory", "centroflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CFLOW_VERSION);
  std::string config_path;

  FlowArgs fa;
  CLI::App* flow = app.add_subcommand("flow", "Run the flow from a body file");
  flow->add_option("--body", fa.body, "Body JSON file")->required();
  flow->add_option("--n", fa.n, "Resample to this grid size (0 keeps the input grid)");
  flow->add_option("--stop-area", fa.stop_area, "Stop once the area drops to this value");
  flow->add_option("--t-end", fa.t_end, "Stop at this time");
  flow->add_option("--cfl", fa.cfl, "Step-size factor");
  flow->add_option("--record-every", fa.record_every, "Steps between recorded rows");
  flow->add_option("--max-steps", fa.max_steps, "Step limit");
  flow->add_option("--frames", fa.frames, "Directory for SVG frames of the normalized body");
  flow->add_option("--out", fa.out, "Output directory");
  flow->add_option("--config", config_path, "JSON config file");

  OpArgs oa;
  CLI::App* op = app.add_subcommand("op", "Apply an affine operator to a body");
  op->add_option("operation", oa.operation, "Operator")
      ->required()
      ->check(CLI::IsMember({"polar", "centroid", "proj", "lambda", "steiner", "bm", "normalize", "deficits"}));
  op->add_option("--body", oa.body, "Body JSON file")->required();
  op->add_option("--n", oa.n, "Resample to this grid size (0 keeps the input grid)");
  op->add_option("--axis", oa.axis, "Steiner axis angle in radians");
  op->add_option("--tol", oa.tol, "Simplex tolerance of the SL(2) searches");
  op->add_option("--out", oa.out, "Output directory");
  op->add_option("--config", config_path, "JSON config file");

  FuzzArgs za;
  CLI::App* fuzz = app.add_subcommand("fuzz", "Seeded inequality fuzzing campaign");
  fuzz->add_option("--seeds", za.seeds, "Number of bodies");
  fuzz->add_option("--seed", za.seed, "Campaign seed");
  fuzz->add_option("--n", za.n, "Grid size");
  fuzz->add_option("--check", za.checks, "Restrict to these checks (repeatable)")
      ->check(CLI::IsMember(fuzz_check_names()));
  fuzz->add_flag("--maps", za.maps, "Apply a random GL(2) map to each body");
  fuzz->add_flag("--with-bm", za.with_bm, "Include the Banach-Mazur check");
  fuzz->add_option("--tol", za.tol, "Lutwak identity tolerance");
  fuzz->add_option("--out", za.out, "Output directory");
  fuzz->add_option("--config", config_path, "JSON config file");

  StabilityArgs sa;
  CLI::App* stab = app.add_subcommand("stability", "Deficit versus Banach-Mazur distance experiment");
  stab->add_option("--samples", sa.samples, "Number of samples");
  stab->add_option("--seed", sa.seed, "Experiment seed");
  stab->add_option("--n", sa.n, "Grid size");
  stab->add_option("--eps-min", sa.eps_min, "Smallest target deficit");
  stab->add_option("--eps-max", sa.eps_max, "Largest target deficit");
  stab->add_option("--tol", sa.tol, "Relative tolerance on the target deficit");
  stab->add_option("--out", sa.out, "Output directory");
  stab->add_option("--config", config_path, "JSON config file");

  MinkowskiArgs ma;
  CLI::App* mink = app.add_subcommand("minkowski", "Solve the planar Minkowski problem");
  mink->add_option("--curvature", ma.curvature, "Curvature JSON file")->required();
  mink->add_option("--n", ma.n, "Resample to this grid size (0 keeps the input grid)");
  mink->add_option("--out", ma.out, "Output directory");
  mink->add_option("--config", config_path, "JSON config file");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config(app, sub, load_json(config_path).value);

    if (sub == flow) return cmd_flow(fa, args, out);
    if (sub == op) return cmd_op(oa, args, out);
    if (sub == fuzz) return cmd_fuzz(za, args, out);
    if (sub == stab) return cmd_stability(sa, args, out);
    return cmd_minkowski(ma, args, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FlowFailure& e) {
    err << "error at t=" << io::format_double(e.time()) << ": " << e.what()
        << "\n";
    return kExitOperator;
  } catch (const GeomError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? kExitIo : kExitOperator;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperator;
  }
}

}  // namespace cflow::cli
