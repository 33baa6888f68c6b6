#pragma once

#include "lrk/diagnostics.hpp"
#include "lrk/lanczos.hpp"
#include "lrk/model.hpp"
#include "lrk/spectrum.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace lrk {

using json = nlohmann::json;

/// Shortest decimal form that reads back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

/// JSON has no infinities; +inf travels as null.
json finite_or_null(double x);
double from_finite_or_null(const json& j);

json to_json(const ModelParams& p);
ModelParams model_params_from_json(const json& j);
json to_json(const LanczosConfig& cfg);
LanczosConfig lanczos_config_from_json(const json& j);
json to_json(const DiagnosticsConfig& cfg);
DiagnosticsConfig diagnostics_config_from_json(const json& j);
json to_json(const EdgeConfig& cfg);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// One row per (theta, mode) of a spectrum scan.
struct SpectrumRow {
  double theta_over_pi = 0.0;
  int mode_index = 0;
  double energy = 0.0;
  double energy_normalized = 0.0;
  double edge_weight = 0.0;
};

std::vector<SpectrumRow> spectrum_rows(double theta_over_pi, const ModeSet& modes);
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);

/// {params, seed, representation, b, n_stable, termination_reason, eps_max}
json lanczos_record(const ModelParams& params, const SeedSpec& seed, const LanczosRun& run);

/// Reads back the fields needed for diagnostics.
struct LanczosRecord {
  ModelParams params;
  std::string seed;
  Representation representation = Representation::Majorana;
  std::vector<double> b;
  int n_stable = 0;
  Termination termination = Termination::MaxSteps;
};

LanczosRecord lanczos_record_from_json(const json& j);

/// Columns n, b_n, parity ("odd"/"even" by n).
std::string lanczos_csv(const std::vector<double>& b, int n_stable);

/// Columns n, eta_n, s_n.
std::string staggering_csv(const StaggeringSeries& series);

/// Adds software version and a UTC timestamp to `config` and writes manifest.json.
void write_manifest(const std::filesystem::path& dir, const std::string& command, json config);

std::string software_version();

}  // namespace lrk
