#include "lrk/io.hpp"

#include "lrk/version.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lrk {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double from_finite_or_null(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json to_json(const ModelParams& p) {
  return {{"n_sites", p.n_sites}, {"alpha", p.alpha}, {"theta", p.theta}, {"epsilon", p.epsilon}};
}

ModelParams model_params_from_json(const json& j) {
  ModelParams p;
  p.n_sites = j.at("n_sites").get<int>();
  p.alpha = j.at("alpha").get<double>();
  p.theta = j.at("theta").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  return p;
}

json to_json(const LanczosConfig& cfg) {
  return {{"reorth_threshold", cfg.reorth_threshold}, {"b_floor", cfg.b_floor},
          {"orthogonality_tol", cfg.orthogonality_tol}, {"cross_check_tol", cfg.cross_check_tol},
          {"max_steps", cfg.max_steps}, {"metric_scale", cfg.metric_scale}};
}

LanczosConfig lanczos_config_from_json(const json& j) {
  LanczosConfig cfg;
  cfg.reorth_threshold = j.at("reorth_threshold").get<double>();
  cfg.b_floor = j.at("b_floor").get<double>();
  cfg.orthogonality_tol = j.at("orthogonality_tol").get<double>();
  cfg.cross_check_tol = j.at("cross_check_tol").get<double>();
  cfg.max_steps = j.at("max_steps").get<int>();
  cfg.metric_scale = j.at("metric_scale").get<double>();
  return cfg;
}

json to_json(const DiagnosticsConfig& cfg) {
  return {{"eta_tol", cfg.eta_tol}, {"n_min", cfg.n_min},
          {"n_max", cfg.n_max ? json(*cfg.n_max) : json(nullptr)}};
}

DiagnosticsConfig diagnostics_config_from_json(const json& j) {
  DiagnosticsConfig cfg;
  cfg.eta_tol = j.at("eta_tol").get<double>();
  cfg.n_min = j.at("n_min").get<int>();
  if (!j.at("n_max").is_null()) cfg.n_max = j.at("n_max").get<int>();
  return cfg;
}

json to_json(const EdgeConfig& cfg) { return {{"ell_edge", cfg.ell_edge}, {"omega_edge", cfg.omega_edge}}; }

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<SpectrumRow> spectrum_rows(double theta_over_pi, const ModeSet& modes) {
  std::vector<SpectrumRow> rows;
  for (int k = 0; k < modes.n_sites(); ++k) {
    const double e = modes.energies(k);
    rows.push_back({theta_over_pi, k, e, e / modes.norm_scale,
                    modes.edge_weights.empty() ? 0.0 : modes.edge_weights[static_cast<std::size_t>(k)]});
  }
  return rows;
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "theta_over_pi,mode_index,energy,energy_normalized,edge_weight\n";
  for (const SpectrumRow& r : rows)
    out += format_double(r.theta_over_pi) + ',' + std::to_string(r.mode_index) + ',' + format_double(r.energy) +
           ',' + format_double(r.energy_normalized) + ',' + format_double(r.edge_weight) + '\n';
  return out;
}

json lanczos_record(const ModelParams& params, const SeedSpec& seed, const LanczosRun& run) {
  return {{"params", to_json(params)},
          {"seed", seed.to_string()},
          {"representation", to_string(run.representation)},
          {"b", run.b},
          {"a", run.a},
          {"n_stable", run.n_stable},
          {"termination_reason", to_string(run.stability.termination)},
          {"eps_max", run.stability.eps_max}};
}

LanczosRecord lanczos_record_from_json(const json& j) {
  LanczosRecord r;
  r.params = model_params_from_json(j.at("params"));
  r.seed = j.at("seed").get<std::string>();
  r.representation = representation_from_string(j.at("representation").get<std::string>());
  r.b = j.at("b").get<std::vector<double>>();
  r.n_stable = j.at("n_stable").get<int>();
  r.termination = termination_from_string(j.at("termination_reason").get<std::string>());
  if (r.n_stable < 0 || r.n_stable > static_cast<int>(r.b.size()))
    throw std::invalid_argument("n_stable inconsistent with the stored coefficients");
  return r;
}

std::string lanczos_csv(const std::vector<double>& b, int n_stable) {
  std::string out = "n,b_n,parity\n";
  for (int n = 1; n <= n_stable; ++n)
    out += std::to_string(n) + ',' + format_double(b[static_cast<std::size_t>(n - 1)]) + ',' +
           (n % 2 == 1 ? "odd" : "even") + '\n';
  return out;
}

std::string staggering_csv(const StaggeringSeries& series) {
  std::string out = "n,eta_n,s_n\n";
  for (std::size_t k = 0; k < series.eta.size(); ++k)
    out += std::to_string(series.n_min + static_cast<int>(k)) + ',' + format_double(series.eta[k]) + ',' +
           std::to_string(series.signs[k]) + '\n';
  return out;
}

std::string software_version() { return kVersion; }

void write_manifest(const fs::path& dir, const std::string& command, json config) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  json manifest = {{"command", command}, {"version", software_version()}, {"timestamp", stamp},
                   {"config", std::move(config)}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace lrk
