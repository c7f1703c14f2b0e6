#include "cflow/body_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace cflow::io {
namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw GeomError(ErrorKind::Io, "malformed input: " + what);
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) malformed(std::string("'") + key + "' must be an array");
  std::vector<double> v;
  v.reserve(j.at(key).size());
  for (const json& x : j.at(key)) {
    if (!x.is_number()) malformed(std::string("'") + key + "' must contain numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

std::size_t grid_size(const json& j) {
  if (!j.contains("n") || !j.at("n").is_number_integer() || j.at("n").get<long long>() <= 0) {
    malformed("'n' must be a positive integer");
  }
  return static_cast<std::size_t>(j.at("n").get<long long>());
}

// Samples either from an explicit array or from a Fourier block.
std::vector<double> grid_or_fourier(const json& j, const char* key) {
  if (!j.is_object()) malformed("expected a JSON object");
  if (j.contains(key)) {
    std::vector<double> v = number_array(j, key);
    if (j.contains("n") && grid_size(j) != v.size()) {
      malformed("'n' does not match the number of samples");
    }
    return v;
  }
  if (!j.contains("fourier") || !j.at("fourier").is_object()) {
    malformed(std::string("expected '") + key + "' or 'fourier'");
  }
  const std::size_t n = grid_size(j);
  if (n % 2 != 0) malformed("'n' must be even");
  const json& f = j.at("fourier");
  const std::vector<double> a = number_array(f, "a");
  const std::vector<double> b = f.contains("b") ? number_array(f, "b") : std::vector<double>{};
  const std::size_t degree = std::max(a.empty() ? 0 : a.size() - 1, b.size());
  if (degree > n / 2) malformed("Fourier degree exceeds n/2");
  spectral::Coefficients c;
  c.a.assign(degree + 1, 0.0);
  c.b.assign(degree + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) c.a[k] = a[k];
  for (std::size_t k = 0; k < b.size(); ++k) c.b[k + 1] = b[k];
  return spectral::synthesize(c, n);
}

}  // namespace

SupportFn body_from_json(const json& j) {
  std::vector<double> h = grid_or_fourier(j, "h");
  bool symmetric = true;
  if (!j.contains("symmetric")) {
    const std::size_t n = h.size();
    double scale = 0.0;
    for (double v : h) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; n % 2 == 0 && i < n / 2; ++i) {
      if (std::abs(h[i] - h[i + n / 2]) > kSymmetryTolerance * scale) symmetric = false;
    }
    if (n % 2 != 0) symmetric = false;
  } else {
    if (!j.at("symmetric").is_boolean()) malformed("'symmetric' must be a boolean");
    symmetric = j.at("symmetric").get<bool>();
  }
  return make_support_fn(std::move(h), symmetric);
}

json body_to_json(const SupportFn& h) {
  json j;
  j["n"] = h.size();
  j["h"] = std::vector<double>(h.samples().begin(), h.samples().end());
  j["symmetric"] = h.symmetric();
  return j;
}

CurvatureFn curvature_from_json(const json& j) {
  std::vector<double> f = grid_or_fourier(j, "f");
  double w = 1.0;
  if (j.contains("weight")) {
    if (!j.at("weight").is_number()) malformed("'weight' must be a number");
    w = j.at("weight").get<double>();
  }
  return CurvatureFn(std::move(f), w);
}

json curvature_to_json(const CurvatureFn& f) {
  json j;
  j["n"] = f.size();
  j["f"] = std::vector<double>(f.samples().begin(), f.samples().end());
  j["weight"] = f.weight();
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeomError(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw GeomError(ErrorKind::Io, "cannot parse '" + origin + "': " + e.what());
  }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path parent = path.parent_path();
  if (!parent.empty()) {
    fs::create_directories(parent, ec);
    if (ec) throw GeomError(ErrorKind::Io, "cannot create directory '" + parent.string() + "'");
  }
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw GeomError(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw GeomError(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw GeomError(ErrorKind::Io, "cannot rename into '" + path.string() + "'");
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw GeomError(ErrorKind::Io, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json RunManifest::to_json() const {
  json j;
  j["command_line"] = command_line;
  j["config"] = config;
  j["input_hash"] = input_hash.empty() ? json(nullptr) : json(input_hash);
  j["outputs"] = outputs;
  j["wall_time_seconds"] = wall_time;
  j["version"] = version;
  return j;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  atomic_write(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

std::string trace_csv(const FlowTrace& trace) {
  std::string out = "t,area,polar_area,bp_ratio,min_S,max_ca2,max_ca3,d_bm,harnack\n";
  for (const FlowRow& r : trace.rows) {
    const double vals[] = {r.t, r.area, r.polar_area, r.bp_ratio, r.min_S,
                           r.max_ca2, r.max_ca3, r.d_bm, r.harnack};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out += ',';
      out += format_double(vals[i]);
    }
    out += '\n';
  }
  return out;
}

std::string scatter_csv(const StabilityResult& res) {
  std::string out = "seed,eps,d_bm_minus_1,pinch_bound,gamma_witness\n";
  for (const StabilitySample& s : res.samples) {
    out += std::to_string(s.seed);
    for (double v : {s.eps, s.d_bm_minus_1, s.pinch_bound, s.gamma_witness}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

json fuzz_report_json(const FuzzReport& rep) {
  json j;
  j["seed"] = rep.seed;
  j["bodies"] = rep.bodies;
  j["tolerance"] = kGapTolerance;
  j["ok"] = rep.ok();
  json checks = json::array();
  for (const CheckSummary& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"min_gap", c.min_gap},
                      {"argmin_seed", c.argmin_seed},
                      {"count", c.count},
                      {"violations", c.violations}});
  }
  j["checks"] = checks;
  return j;
}

json stability_summary_json(const StabilityResult& res) {
  json j;
  j["samples"] = res.samples.size();
  j["gamma"] = res.gamma;
  j["slope"] = res.slope;
  j["intercept"] = res.intercept;
  j["fit_count"] = res.fit_count;
  j["unreachable"] = res.unreachable;
  j["max_eps"] = res.max_eps;
  j["decade_counts"] = res.decade_counts;
  return j;
}

std::string svg_frame(const SupportFn& h) {
  const auto pts = boundary_points(h, std::max<std::size_t>(h.size(), 256));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-2 -2 4 4\" width=\"400\" height=\"400\">\n";
  os << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.01\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"0.015\" points=\"";
  char buf[64];
  for (std::size_t i = 0; i <= pts.size(); ++i) {
    const auto& p = pts[i % pts.size()];
    std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", i ? " " : "", p[0], -p[1]);
    os << buf;
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace cflow::io
