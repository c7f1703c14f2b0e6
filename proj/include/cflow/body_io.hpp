#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cflow/flow.hpp"
#include "cflow/geom_core.hpp"
#include "cflow/inequality_lab.hpp"

namespace cflow::io {

using nlohmann::json;

// Body JSON: {"n", "h", "symmetric"} or {"n", "fourier": {"a": [a0..], "b": [b1..]}, "symmetric"}.
// Without "symmetric" the flag is inferred from the antipodal mismatch.
SupportFn body_from_json(const json& j);
json body_to_json(const SupportFn& h);

// Curvature JSON: {"n", "f", "weight"} or {"n", "fourier": {...}, "weight"}.
CurvatureFn curvature_from_json(const json& j);
json curvature_to_json(const CurvatureFn& f);

std::string read_file(const std::filesystem::path& path);
json parse_json(const std::string& text, const std::string& origin);

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& bytes);

// Shortest round-trip decimal with 17 significant digits.
std::string format_double(double v);

struct RunManifest {
  std::string command_line;
  json config = json::object();
  std::string input_hash;  // empty: no input file
  std::vector<std::string> outputs;
  double wall_time = 0.0;
  std::string version;

  json to_json() const;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

std::string trace_csv(const FlowTrace& trace);
std::string scatter_csv(const StabilityResult& res);
json fuzz_report_json(const FuzzReport& rep);
json stability_summary_json(const StabilityResult& res);

// Boundary polyline of h with a unit-circle overlay, viewBox [-2, 2]^2.
std::string svg_frame(const SupportFn& h);

}  // namespace cflow::io
