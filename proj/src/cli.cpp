#include "lrk/cli.hpp"

#include "lrk/diagnostics.hpp"
#include "lrk/io.hpp"
#include "lrk/lanczos.hpp"
#include "lrk/model.hpp"
#include "lrk/oracle.hpp"
#include "lrk/spectrum.hpp"
#include "lrk/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>

namespace lrk::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for bad user input discovered after flag parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw UsageError("not a number: '" + text + "'");
  return value;
}

struct ModelFlags {
  int n_sites = 100;
  std::string alpha = "2";
  std::optional<double> theta;
  std::optional<double> theta_pi;
  double epsilon = -0.2;
  std::string seed = "gamma1";

  ModelParams params() const {
    ModelParams p;
    p.n_sites = n_sites;
    p.alpha = parse_alpha(alpha);
    p.theta = theta ? *theta : std::numbers::pi * theta_pi.value_or(0.4);
    p.epsilon = epsilon;
    p.validate();
    return p;
  }

  SeedSpec seed_spec() const { return SeedSpec::parse(seed); }
};

struct LanczosFlags {
  LanczosConfig cfg;
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_seed = true) {
  app->add_option("--n", f.n_sites, "Number of sites N")->capture_default_str();
  app->add_option("--alpha", f.alpha, "Power-law exponent (decimal or fraction such as 2/3)")->capture_default_str();
  auto* theta = app->add_option("--theta", f.theta, "Interpolation angle in radians");
  auto* theta_pi = app->add_option("--theta-pi", f.theta_pi, "Interpolation angle in units of pi (default 0.4)");
  theta->excludes(theta_pi);
  app->add_option("--epsilon", f.epsilon, "Hopping/pairing imbalance")->capture_default_str();
  if (with_seed)
    app->add_option("--seed", f.seed, "Seed operator, e.g. gamma1, gamma1+gamma2, gammaN, gammaN+gammaN+1")
        ->capture_default_str();
}

void add_lanczos_flags(CLI::App* app, LanczosConfig& cfg) {
  app->add_option("--reorth-threshold", cfg.reorth_threshold, "Partial reorthogonalization threshold p")
      ->capture_default_str();
  app->add_option("--b-floor", cfg.b_floor, "Stop when b_n falls to this value")->capture_default_str();
  app->add_option("--ortho-tol", cfg.orthogonality_tol, "Maximum tolerated loss of orthogonality")
      ->capture_default_str();
  app->add_option("--cross-check-tol", cfg.cross_check_tol, "Majorana/Nambu agreement tolerance")
      ->capture_default_str();
  app->add_option("--max-steps", cfg.max_steps, "Maximum number of b_n (0 means 2N)")->capture_default_str();
}

void add_diagnostics_flags(CLI::App* app, DiagnosticsConfig& cfg, std::optional<int>& n_max) {
  app->add_option("--eta-tol", cfg.eta_tol, "Sign tolerance on eta_n")->capture_default_str();
  app->add_option("--n-min", cfg.n_min, "First staggering index")->capture_default_str();
  app->add_option("--n-max", n_max, "Last staggering index (default floor(n_stable/2))");
}

/// Applies key=value lines from the file named by --config to options the
/// command line left unset.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw UsageError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw UsageError("cannot read config file " + path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "config") throw UsageError("config files cannot include other config files");
    CLI::Option* opt = app->get_option_no_throw("--" + item.name);
    if (!opt) throw UsageError("unknown key '" + item.name + "' in config file " + path);
    if (opt->count() > 0) continue;
    try {
      if (opt->get_expected_min() == 0)
        opt->add_result(item.inputs.empty() ? std::string("true") : item.inputs.front());
      else
        for (const std::string& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("bad value for '" + item.name + "' in config file: " + e.what());
    }
  }
}

int resolve_workers(const CLI::Option* flag, int value) {
  if (flag->count() > 0) {
    if (value < 1) throw UsageError("--workers must be >= 1");
    return value;
  }
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    int parsed = 0;
    const char* last = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, last, parsed);
    if (ec != std::errc() || ptr != last || parsed < 1)
      throw UsageError(std::string(kWorkersEnv) + " must be a positive integer");
    return parsed;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string alpha_file_tag(const std::string& text) {
  std::string tag;
  for (char c : text) tag += c == '/' ? '_' : c;
  return tag;
}

json gap_summary(const ModeSet& modes, int n_sites) {
  json out = json::object();
  for (double w : {0.05, 0.1, 0.5}) {
    const GapClassification g = classify_gaps(modes, EdgeConfig::for_chain(n_sites, w));
    out[GridSpec::threshold_tag(w)] = {{"phase", to_string(g.phase)},
                                       {"delta_edge", finite_or_null(g.delta_edge)},
                                       {"delta_bulk", finite_or_null(g.delta_bulk)},
                                       {"edge_modes", g.edge_mode_count}};
  }
  return out;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
  int n_sites = 100;
  std::vector<std::string> alphas{"3"};
  double epsilon = -0.2;
  int theta_points = 99;
  int ell_edge = 0;
  std::string out = "out";
  std::string config;

  int operator()(std::ostream& log) const {
    if (theta_points < 1) throw UsageError("--theta-points must be >= 1");
    fs::create_directories(out);
    json files = json::array();
    for (const std::string& alpha_text : alphas) {
      const double alpha = parse_alpha(alpha_text);
      std::vector<SpectrumRow> rows;
      for (int j = 1; j <= theta_points; ++j) {
        const double t = static_cast<double>(j) / (theta_points + 1);
        const ModelParams p{n_sites, alpha, std::numbers::pi * t, epsilon};
        const ModeSet modes = diagonalize_bdg(build_bdg(build_coupling_matrices(p)));
        ModeSet weighted = modes;
        if (ell_edge > 0) weighted.edge_weights = edge_weights(modes, ell_edge);
        const std::vector<SpectrumRow> part = spectrum_rows(t, weighted);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const std::string name = "spectrum_alpha" + alpha_file_tag(alpha_text) + ".csv";
      write_file_atomic(fs::path(out) / name, spectrum_csv(rows));
      files.push_back({{"alpha", alpha}, {"alpha_text", alpha_text}, {"file", name}});
      log << "wrote " << (fs::path(out) / name).string() << " (" << rows.size() << " rows)\n";
    }
    const int ell = ell_edge > 0 ? ell_edge : EdgeConfig::for_chain(n_sites).ell_edge;
    write_manifest(out, "spectrum",
                   {{"n_sites", n_sites}, {"epsilon", epsilon}, {"theta_points", theta_points},
                    {"theta_over_pi", "j/(theta_points+1), j=1..theta_points"}, {"ell_edge", ell},
                    {"files", files}});
    return kExitOk;
  }
};

// ----------------------------------------------------------------- lanczos

struct LanczosCmd {
  ModelFlags model;
  LanczosConfig cfg;
  std::string representation = "both";
  std::string out = "out";
  std::string config;

  int operator()(std::ostream& log) const {
    const ModelParams params = model.params();
    const SeedSpec seed = model.seed_spec();
    seed.majorana_vector(params.n_sites);
    cfg.validate();
    fs::create_directories(out);
    const CouplingMatrices couplings = build_coupling_matrices(params);

    json summary = {{"params", to_json(params)}, {"seed", seed.to_string()}};
    std::vector<double> csv_b;
    int csv_depth = 0;
    if (representation == "both") {
      const DualRun dual = lanczos_dual(couplings, seed, cfg);
      write_file_atomic(fs::path(out) / "lanczos_majorana.json",
                        lanczos_record(params, seed, dual.majorana).dump(2) + "\n");
      write_file_atomic(fs::path(out) / "lanczos_nambu.json", lanczos_record(params, seed, dual.nambu).dump(2) + "\n");
      summary["cross_checked"] = dual.cross_checked;
      summary["stable_depth"] = dual.stable_depth;
      summary["termination_reason"] = to_string(dual.termination);
      csv_b = dual.majorana.b;
      csv_depth = dual.stable_depth;
    } else {
      const Representation rep = representation_from_string(representation);
      const LanczosRun run = rep == Representation::Majorana
                                 ? lanczos_majorana(build_majorana_generator(couplings), seed, cfg)
                                 : lanczos_nambu(build_bdg(couplings), seed, cfg);
      write_file_atomic(fs::path(out) / ("lanczos_" + representation + ".json"),
                        lanczos_record(params, seed, run).dump(2) + "\n");
      summary["stable_depth"] = run.n_stable;
      summary["termination_reason"] = to_string(run.stability.termination);
      csv_b = run.b;
      csv_depth = run.n_stable;
    }
    write_file_atomic(fs::path(out) / "lanczos.csv", lanczos_csv(csv_b, csv_depth));
    write_manifest(out, "lanczos",
                   {{"model", to_json(params)}, {"seed", seed.to_string()}, {"representation", representation},
                    {"lanczos", to_json(cfg)}});
    log << "seed " << seed.to_string() << ": stable depth " << csv_depth << " ("
        << summary["termination_reason"].get<std::string>() << ")\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- diagnose

struct DiagnoseCmd {
  ModelFlags model;
  LanczosConfig lanczos;
  DiagnosticsConfig diag;
  std::optional<int> n_max;
  std::string input;
  std::string out = "out";
  std::string config;

  int operator()(std::ostream& log) const {
    DiagnosticsConfig cfg = diag;
    cfg.n_max = n_max;
    cfg.validate();

    ModelParams params;
    std::string seed_text;
    std::vector<double> b;
    int depth = 0;
    std::string termination;
    if (!input.empty()) {
      json record;
      try {
        record = json::parse(read_file(input));
      } catch (const json::exception& e) {
        throw UsageError("cannot parse " + input + ": " + e.what());
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
      LanczosRecord rec;
      try {
        rec = lanczos_record_from_json(record);
      } catch (const json::exception& e) {
        throw UsageError("malformed Lanczos record in " + input + ": " + e.what());
      }
      params = rec.params;
      params.validate();
      seed_text = rec.seed;
      b = rec.b;
      depth = rec.n_stable;
      termination = to_string(rec.termination);
    } else {
      params = model.params();
      const SeedSpec seed = model.seed_spec();
      seed_text = seed.to_string();
      lanczos.validate();
      const DualRun dual = lanczos_dual(build_coupling_matrices(params), seed, lanczos);
      b = dual.majorana.b;
      depth = dual.stable_depth;
      termination = to_string(dual.termination);
    }

    const StaggeringSeries series = staggering(std::span<const double>(b.data(), static_cast<std::size_t>(depth)), cfg);
    const ModeSet modes = diagonalize_bdg(build_bdg(build_coupling_matrices(params)));

    fs::create_directories(out);
    write_file_atomic(fs::path(out) / "staggering.csv", staggering_csv(series));
    const json summary = {{"params", to_json(params)},
                          {"seed", seed_text},
                          {"n_cross", series.n_cross},
                          {"krylov_phase", series.krylov_edge() ? "edge" : "bulk"},
                          {"n_min", series.n_min},
                          {"n_max", series.n_max},
                          {"n_stable", depth},
                          {"termination_reason", termination},
                          {"eta_tol", cfg.eta_tol},
                          {"gap", gap_summary(modes, params.n_sites)}};
    write_file_atomic(fs::path(out) / "summary.json", summary.dump(2) + "\n");
    json manifest = {{"model", to_json(params)}, {"seed", seed_text}, {"diagnostics", to_json(cfg)}};
    if (!input.empty())
      manifest["input"] = fs::absolute(input).string();
    else
      manifest["lanczos"] = to_json(lanczos);
    write_manifest(out, "diagnose", manifest);
    log << "N_cross = " << series.n_cross << " (" << (series.krylov_edge() ? "edge" : "bulk") << "), window n = "
        << series.n_min << ".." << series.n_max << "\n";
    return kExitOk;
  }
};

// ------------------------------------------------------------------- sweep

struct SweepCmd {
  GridSpec grid;
  std::string seed = "gamma1";
  std::optional<int> n_max;
  int workers = 1;
  bool resume = false;
  int flush_every = 16;
  std::optional<int> max_new_points;
  std::string out = "out";
  std::string config;
  const CLI::Option* workers_flag = nullptr;

  int operator()(std::ostream& log) const {
    GridSpec spec = grid;
    spec.seed = SeedSpec::parse(seed);
    spec.diagnostics.n_max = n_max;
    spec.validate();
    SweepOptions opts;
    opts.out_dir = out;
    opts.workers = resolve_workers(workers_flag, workers);
    opts.resume = resume;
    opts.flush_every = flush_every;
    opts.max_new_points = max_new_points;

    const SweepResult result = run_sweep(spec, opts);
    write_file_atomic(fs::path(out) / kPhaseCsvName, phase_csv(spec, result.points));
    json agreement = json::object();
    for (std::size_t k = 0; k < spec.thresholds.size(); ++k) {
      const AgreementReport rep = agreement_report(result.points, k);
      agreement[GridSpec::threshold_tag(spec.thresholds[k])] = {
          {"fraction", rep.fraction}, {"compared", rep.compared}, {"failed", rep.failed}};
    }
    write_file_atomic(fs::path(out) / "agreement.json",
                      json{{"complete", result.complete}, {"agreement", agreement}}.dump(2) + "\n");
    log << "sweep: " << result.computed << " computed, " << result.resumed << " resumed, "
        << result.points.size() << "/" << spec.cell_count() << " cells" << (result.complete ? "" : " (incomplete)")
        << "\n";
    return kExitOk;
  }
};

// ------------------------------------------------------------------ oracle

struct OracleCmd {
  ModelFlags model;
  bool as_json = false;
  std::string out;
  std::string config;

  int operator()(std::ostream& log) const {
    const ModelParams params = model.params();
    if (params.n_sites > kOracleMaxSites)
      throw UsageError("oracle supports N <= " + std::to_string(kOracleMaxSites));
    const SeedSpec seed = model.seed_spec();
    const OracleReport r = oracle_report(params, seed);
    const json report = {{"params", to_json(params)},
                         {"seed", seed.to_string()},
                         {"anticommutator_residual", r.algebra.anticommutator},
                         {"trace_residual", r.algebra.trace_single},
                         {"trace_pair_residual", r.algebra.trace_pair},
                         {"closure_residual", r.closure_residual},
                         {"hamiltonian_residual", r.hamiltonian_residual},
                         {"b_deviation_majorana", r.b_deviation_majorana},
                         {"b_deviation_nambu", r.b_deviation_nambu},
                         {"hs_prefactor_deviation", r.hs_prefactor_deviation},
                         {"max_abs_a", r.max_abs_a},
                         {"linear_leakage", r.linear_leakage},
                         {"krylov_dimension", r.krylov_dimension},
                         {"lengths_match", r.lengths_match},
                         {"passed", r.passed()}};
    if (as_json) {
      log << report.dump(2) << "\n";
    } else {
      log << params.describe() << " seed=" << seed.to_string() << "\n";
      for (const char* key : {"anticommutator_residual", "trace_residual", "trace_pair_residual", "closure_residual",
                              "hamiltonian_residual", "b_deviation_majorana", "b_deviation_nambu",
                              "hs_prefactor_deviation", "max_abs_a", "linear_leakage"})
        log << "  " << key << " = " << format_double(report[key].get<double>()) << "\n";
      log << "  krylov_dimension = " << r.krylov_dimension << " (bound " << 2 * params.n_sites << ")\n";
      log << (r.passed() ? "PASS" : "FAIL") << "\n";
    }
    if (!out.empty()) {
      fs::create_directories(out);
      write_file_atomic(fs::path(out) / "oracle.json", report.dump(2) + "\n");
      write_manifest(out, "oracle", {{"model", to_json(params)}, {"seed", seed.to_string()}});
    }
    return r.passed() ? kExitOk : kExitNumerical;
  }
};

}  // namespace

double parse_alpha(const std::string& text) {
  const auto slash = text.find('/');
  double value = 0.0;
  if (slash == std::string::npos) {
    value = parse_number(text);
  } else {
    const double num = parse_number(text.substr(0, slash));
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw UsageError("alpha denominator is zero");
    value = num / den;
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw UsageError("alpha must be positive and finite");
  return value;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-range Kitaev chain: spectra, operator Lanczos, staggering diagnostics, phase sweeps", "lrk"};
  app.require_subcommand(1);

  SpectrumCmd spectrum;
  auto* sp = app.add_subcommand("spectrum", "BdG spectrum and edge weights over a theta scan");
  sp->add_option("--n", spectrum.n_sites, "Number of sites N")->capture_default_str();
  sp->add_option("--alpha", spectrum.alphas, "One or more exponents; one CSV per value")->capture_default_str();
  sp->add_option("--epsilon", spectrum.epsilon, "Hopping/pairing imbalance")->capture_default_str();
  sp->add_option("--theta-points", spectrum.theta_points, "Interior scan points theta/pi = j/(P+1)")
      ->capture_default_str();
  sp->add_option("--ell-edge", spectrum.ell_edge, "Boundary window (0 means floor(sqrt N))")->capture_default_str();
  sp->add_option("--out", spectrum.out, "Output directory")->capture_default_str();
  sp->add_option("--config", spectrum.config, "key=value file; flags take precedence");

  LanczosCmd lanczos;
  auto* lz = app.add_subcommand("lanczos", "Single-particle operator Lanczos coefficients");
  add_model_flags(lz, lanczos.model);
  add_lanczos_flags(lz, lanczos.cfg);
  lz->add_option("--representation", lanczos.representation, "both, majorana or nambu")
      ->check(CLI::IsMember({"both", "majorana", "nambu"}))
      ->capture_default_str();
  lz->add_option("--out", lanczos.out, "Output directory")->capture_default_str();
  lz->add_option("--config", lanczos.config, "key=value file; flags take precedence");

  DiagnoseCmd diagnose;
  auto* dg = app.add_subcommand("diagnose", "Staggering parameter and crossing count");
  add_model_flags(dg, diagnose.model);
  add_lanczos_flags(dg, diagnose.lanczos);
  add_diagnostics_flags(dg, diagnose.diag, diagnose.n_max);
  dg->add_option("--input", diagnose.input, "Lanczos JSON record to analyse instead of recomputing");
  dg->add_option("--out", diagnose.out, "Output directory")->capture_default_str();
  dg->add_option("--config", diagnose.config, "key=value file; flags take precedence");

  SweepCmd sweep;
  auto* sw = app.add_subcommand("sweep", "Joint Krylov/gap phase diagram over an (alpha, theta) grid");
  sw->add_option("--n", sweep.grid.n_sites, "Number of sites N")->capture_default_str();
  sw->add_option("--epsilon", sweep.grid.epsilon, "Hopping/pairing imbalance")->capture_default_str();
  sw->add_option("--seed", sweep.seed, "Seed operator")->capture_default_str();
  sw->add_option("--alpha-points", sweep.grid.alpha_points, "Grid points in alpha")->capture_default_str();
  sw->add_option("--alpha-max", sweep.grid.alpha_max, "Largest alpha (included)")->capture_default_str();
  sw->add_option("--theta-points", sweep.grid.theta_points, "Interior grid points in theta")->capture_default_str();
  sw->add_option("--thresholds", sweep.grid.thresholds, "Edge-weight thresholds")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--report-threshold", sweep.grid.report_threshold, "Threshold for the delta columns")
      ->capture_default_str();
  sw->add_option("--ell-edge", sweep.grid.ell_edge, "Boundary window (0 means floor(sqrt N))")->capture_default_str();
  add_lanczos_flags(sw, sweep.grid.lanczos);
  add_diagnostics_flags(sw, sweep.grid.diagnostics, sweep.n_max);
  sweep.workers_flag = sw->add_option("--workers", sweep.workers,
                                      std::string("Worker threads (default: ") + kWorkersEnv + " or all CPUs)");
  sw->add_flag("--resume", sweep.resume, "Continue from the checkpoint in --out");
  sw->add_option("--flush-every", sweep.flush_every, "Checkpoint flush interval in points")->capture_default_str();
  sw->add_option("--max-new-points", sweep.max_new_points, "Stop after evaluating this many new points");
  sw->add_option("--out", sweep.out, "Output directory")->capture_default_str();
  sw->add_option("--config", sweep.config, "key=value file; flags take precedence");

  OracleCmd oracle;
  oracle.model.n_sites = 3;
  oracle.model.alpha = "1";
  oracle.model.theta_pi = 1.0 / 3.0;
  auto* oc = app.add_subcommand("oracle", "Many-body checks at N <= 4");
  add_model_flags(oc, oracle.model);
  oc->add_flag("--json", oracle.as_json, "Print the report as JSON");
  oc->add_option("--out", oracle.out, "Also write oracle.json and a manifest here");
  oc->add_option("--config", oracle.config, "key=value file; flags take precedence");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sp->parsed()) {
      apply_config(sp, spectrum.config);
      return spectrum(out);
    }
    if (lz->parsed()) {
      apply_config(lz, lanczos.config);
      return lanczos(out);
    }
    if (dg->parsed()) {
      apply_config(dg, diagnose.config);
      return diagnose(out);
    }
    if (sw->parsed()) {
      apply_config(sw, sweep.config);
      return sweep(out);
    }
    apply_config(oc, oracle.config);
    return oracle(out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lrk::cli
