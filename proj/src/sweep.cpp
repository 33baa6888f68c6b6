#include "lrk/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace lrk {

namespace fs = std::filesystem;

namespace {

GapPhase gap_phase_from_string(const std::string& s) {
  if (s == "edge") return GapPhase::EdgeGap;
  if (s == "bulk") return GapPhase::BulkGap;
  throw std::invalid_argument("unknown gap phase '" + s + "'");
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += l + '\n';
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (alpha_points < 1 || theta_points < 1) throw std::invalid_argument("grid needs at least one point per axis");
  if (!(alpha_max > 0.0) || !std::isfinite(alpha_max)) throw std::invalid_argument("alpha_max must be positive");
  if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2");
  if (!std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite");
  if (thresholds.empty()) throw std::invalid_argument("at least one edge threshold is required");
  std::set<std::string> tags;
  for (double w : thresholds) {
    edge_config(w).validate(n_sites);
    if (!tags.insert(threshold_tag(w)).second) throw std::invalid_argument("duplicate edge threshold");
  }
  report_index();
  seed.majorana_vector(n_sites);
  lanczos.validate();
  diagnostics.validate();
}

double GridSpec::alpha(int i) const { return alpha_max * i / alpha_points; }

double GridSpec::theta(int j) const { return std::numbers::pi * j / (theta_points + 1); }

int GridSpec::report_index() const {
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    if (thresholds[k] == report_threshold) return static_cast<int>(k);
  throw std::invalid_argument("report threshold must be one of the edge thresholds");
}

EdgeConfig GridSpec::edge_config(double omega) const {
  EdgeConfig cfg = EdgeConfig::for_chain(n_sites, omega);
  if (ell_edge > 0) cfg.ell_edge = ell_edge;
  return cfg;
}

std::string GridSpec::threshold_tag(double omega) {
  const double hundredths = omega * 100.0;
  if (std::abs(hundredths - std::round(hundredths)) < 1e-9 && hundredths < 1000.0) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "w%03d", static_cast<int>(std::lround(hundredths)));
    return buf;
  }
  std::string s = "w" + format_double(omega);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

json to_json(const GridSpec& spec) {
  return {{"alpha_points", spec.alpha_points}, {"alpha_max", spec.alpha_max},
          {"theta_points", spec.theta_points}, {"n_sites", spec.n_sites},
          {"epsilon", spec.epsilon},           {"seed", spec.seed.to_string()},
          {"thresholds", spec.thresholds},     {"report_threshold", spec.report_threshold},
          {"ell_edge", spec.ell_edge},         {"lanczos", to_json(spec.lanczos)},
          {"diagnostics", to_json(spec.diagnostics)}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec s;
  s.alpha_points = j.at("alpha_points").get<int>();
  s.alpha_max = j.at("alpha_max").get<double>();
  s.theta_points = j.at("theta_points").get<int>();
  s.n_sites = j.at("n_sites").get<int>();
  s.epsilon = j.at("epsilon").get<double>();
  s.seed = SeedSpec::parse(j.at("seed").get<std::string>());
  s.thresholds = j.at("thresholds").get<std::vector<double>>();
  s.report_threshold = j.at("report_threshold").get<double>();
  s.ell_edge = j.at("ell_edge").get<int>();
  s.lanczos = lanczos_config_from_json(j.at("lanczos"));
  s.diagnostics = diagnostics_config_from_json(j.at("diagnostics"));
  return s;
}

json to_json(const PhasePoint& p) {
  json phases = json::array();
  for (GapPhase g : p.gap_phases) phases.push_back(to_string(g));
  json out = {{"i", p.i},
              {"j", p.j},
              {"alpha", p.alpha},
              {"theta", p.theta},
              {"n_cross", p.n_cross},
              {"krylov_phase", to_string(p.krylov_phase())},
              {"gap_phases", phases},
              {"delta_edge", finite_or_null(p.delta_edge)},
              {"delta_bulk", finite_or_null(p.delta_bulk)},
              {"n_stable", p.n_stable},
              {"termination", to_string(p.termination)}};
  if (p.error) out["error"] = *p.error;
  return out;
}

PhasePoint phase_point_from_json(const json& j) {
  PhasePoint p;
  p.i = j.at("i").get<int>();
  p.j = j.at("j").get<int>();
  p.alpha = j.at("alpha").get<double>();
  p.theta = j.at("theta").get<double>();
  p.n_cross = j.at("n_cross").get<int>();
  p.krylov_edge = j.at("krylov_phase").get<std::string>() == "edge";
  for (const json& g : j.at("gap_phases")) p.gap_phases.push_back(gap_phase_from_string(g.get<std::string>()));
  p.delta_edge = from_finite_or_null(j.at("delta_edge"));
  p.delta_bulk = from_finite_or_null(j.at("delta_bulk"));
  p.n_stable = j.at("n_stable").get<int>();
  p.termination = termination_from_string(j.at("termination").get<std::string>());
  if (j.contains("error")) p.error = j.at("error").get<std::string>();
  return p;
}

PhasePoint compute_phase_point(const GridSpec& spec, int i, int j) {
  PhasePoint pt;
  pt.i = i;
  pt.j = j;
  pt.alpha = spec.alpha(i);
  pt.theta = spec.theta(j);
  const ModelParams params{spec.n_sites, pt.alpha, pt.theta, spec.epsilon};
  try {
    const CouplingMatrices couplings = build_coupling_matrices(params);
    const DualRun dual = lanczos_dual(couplings, spec.seed, spec.lanczos);
    pt.n_stable = dual.stable_depth;
    pt.termination = dual.termination;
    const StaggeringSeries series = staggering(dual, spec.diagnostics);
    pt.n_cross = series.n_cross;
    pt.krylov_edge = series.krylov_edge();

    const ModeSet modes = diagonalize_bdg(build_bdg(couplings));
    const std::size_t report = static_cast<std::size_t>(spec.report_index());
    for (std::size_t k = 0; k < spec.thresholds.size(); ++k) {
      const GapClassification gaps = classify_gaps(modes, spec.edge_config(spec.thresholds[k]));
      pt.gap_phases.push_back(gaps.phase);
      if (k == report) {
        pt.delta_edge = gaps.delta_edge;
        pt.delta_bulk = gaps.delta_bulk;
      }
    }
  } catch (const std::exception& e) {
    pt.error = params.describe() + ": " + e.what();
    pt.n_cross = -1;
    pt.krylov_edge = false;
    pt.gap_phases.clear();
    pt.delta_edge = std::numeric_limits<double>::quiet_NaN();
    pt.delta_bulk = std::numeric_limits<double>::quiet_NaN();
  }
  return pt;
}

SweepResult run_sweep(const GridSpec& spec, const SweepOptions& opts) {
  spec.validate();
  if (opts.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (opts.flush_every < 1) throw std::invalid_argument("flush_every must be >= 1");
  const int total = spec.cell_count();
  const auto index = [&](int i, int j) { return (i - 1) * spec.theta_points + (j - 1); };

  std::vector<std::optional<PhasePoint>> cells(static_cast<std::size_t>(total));
  std::vector<std::string> log;
  SweepResult result;

  const bool checkpointing = !opts.out_dir.empty();
  const fs::path checkpoint = checkpointing ? opts.out_dir / kCheckpointName : fs::path{};
  if (checkpointing) {
    fs::create_directories(opts.out_dir);
    const fs::path manifest = opts.out_dir / "manifest.json";
    if (opts.resume && fs::exists(manifest)) {
      const json stored = json::parse(read_file(manifest));
      if (stored.at("config").at("grid") != to_json(spec))
        throw std::invalid_argument("checkpoint in " + opts.out_dir.string() + " was written for a different grid");
      if (fs::exists(checkpoint)) {
        std::istringstream in(read_file(checkpoint));
        std::string line;
        while (std::getline(in, line)) {
          // A line cut short by an interruption is simply recomputed.
          const json rec = json::parse(line, nullptr, false);
          if (rec.is_discarded()) continue;
          try {
            PhasePoint p = phase_point_from_json(rec);
            if (p.i < 1 || p.i > spec.alpha_points || p.j < 1 || p.j > spec.theta_points) continue;
            auto& slot = cells[static_cast<std::size_t>(index(p.i, p.j))];
            if (slot) continue;
            slot = std::move(p);
            log.push_back(line);
            ++result.resumed;
          } catch (const json::exception&) {
          } catch (const std::invalid_argument&) {
          }
        }
      }
    }
    write_manifest(opts.out_dir, "sweep", {{"grid", to_json(spec)}});
    write_file_atomic(checkpoint, join_lines(log));
  }

  std::vector<int> pending;
  for (int c = 0; c < total; ++c)
    if (!cells[static_cast<std::size_t>(c)]) pending.push_back(c);
  if (opts.max_new_points && static_cast<int>(pending.size()) > *opts.max_new_points)
    pending.resize(static_cast<std::size_t>(std::max(0, *opts.max_new_points)));

  const int n_pending = static_cast<int>(pending.size());
  const int n_workers = std::max(1, std::min(opts.workers, n_pending));
  std::mutex mutex;
  std::condition_variable ready;
  std::vector<std::pair<int, PhasePoint>> inbox;
  std::exception_ptr failure;

  std::vector<std::thread> threads;
  for (int w = 0; w < n_workers && n_pending > 0; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(n_pending) * w / n_workers);
    const int end = static_cast<int>(static_cast<long long>(n_pending) * (w + 1) / n_workers);
    threads.emplace_back([&, begin, end] {
      for (int k = begin; k < end; ++k) {
        const int c = pending[static_cast<std::size_t>(k)];
        std::pair<int, PhasePoint> item;
        try {
          item = {c, compute_phase_point(spec, c / spec.theta_points + 1, c % spec.theta_points + 1)};
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
          item = {-1, PhasePoint{}};
        }
        {
          std::lock_guard lock(mutex);
          inbox.push_back(std::move(item));
        }
        ready.notify_one();
      }
    });
  }

  int received = 0;
  int since_flush = 0;
  while (received < n_pending) {
    std::vector<std::pair<int, PhasePoint>> batch;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return !inbox.empty(); });
      batch.swap(inbox);
    }
    for (auto& [c, p] : batch) {
      ++received;
      if (c < 0) continue;
      if (checkpointing) log.push_back(to_json(p).dump());
      cells[static_cast<std::size_t>(c)] = std::move(p);
      ++result.computed;
      ++since_flush;
    }
    if (checkpointing && since_flush >= opts.flush_every) {
      write_file_atomic(checkpoint, join_lines(log));
      since_flush = 0;
    }
  }
  for (std::thread& t : threads) t.join();
  if (checkpointing && since_flush > 0) write_file_atomic(checkpoint, join_lines(log));
  if (failure) std::rethrow_exception(failure);

  for (auto& cell : cells)
    if (cell) result.points.push_back(std::move(*cell));
  result.complete = static_cast<int>(result.points.size()) == total;
  return result;
}

std::string phase_csv(const GridSpec& spec, const std::vector<PhasePoint>& points) {
  const std::string report_tag = GridSpec::threshold_tag(spec.report_threshold);
  std::string out = "alpha,theta,n_cross,krylov_phase";
  for (double w : spec.thresholds) out += ",gap_phase_" + GridSpec::threshold_tag(w);
  out += ",delta_edge_" + report_tag + ",delta_bulk_" + report_tag + ",n_stable,termination\n";
  for (const PhasePoint& p : points) {
    out += format_double(p.alpha) + ',' + format_double(p.theta) + ',';
    if (!p.ok()) {
      out += "-1,error";
      for (std::size_t k = 0; k < spec.thresholds.size(); ++k) out += ",error";
      out += ",nan,nan,0,error\n";
      continue;
    }
    out += std::to_string(p.n_cross) + ',' + to_string(p.krylov_phase());
    for (GapPhase g : p.gap_phases) out += ',' + to_string(g);
    out += ',' + format_double(p.delta_edge) + ',' + format_double(p.delta_bulk) + ',' + std::to_string(p.n_stable) +
           ',' + to_string(p.termination) + '\n';
  }
  return out;
}

AgreementReport agreement_report(const std::vector<PhasePoint>& points, std::size_t k) {
  AgreementReport out;
  for (const PhasePoint& p : points) {
    if (!p.ok()) {
      ++out.failed;
      continue;
    }
    if (k >= p.gap_phases.size()) throw std::out_of_range("threshold index out of range");
    ++out.compared;
    if (p.krylov_phase() == p.gap_phases[k])
      ++out.agreeing;
    else
      out.disagreements.push_back({p.i, p.j, p.alpha, p.theta, p.krylov_phase(), p.gap_phases[k]});
  }
  out.fraction = out.compared > 0 ? static_cast<double>(out.agreeing) / out.compared : 0.0;
  return out;
}

PhaseGrid::PhaseGrid(const GridSpec& spec, const std::vector<PhasePoint>& points)
    : p_(spec.alpha_points), q_(spec.theta_points), cells_(static_cast<std::size_t>(p_ * q_), nullptr) {
  for (const PhasePoint& pt : points) {
    if (pt.i < 1 || pt.i > p_ || pt.j < 1 || pt.j > q_) throw std::out_of_range("point outside the grid");
    cells_[static_cast<std::size_t>((pt.i - 1) * q_ + (pt.j - 1))] = &pt;
  }
}

const PhasePoint* PhaseGrid::at(int i, int j) const {
  if (i < 1 || i > p_ || j < 1 || j > q_) return nullptr;
  return cells_[static_cast<std::size_t>((i - 1) * q_ + (j - 1))];
}

bool PhaseGrid::near_gap_boundary(int i, int j, std::size_t k) const {
  const PhasePoint* centre = at(i, j);
  if (!centre || !centre->ok()) return false;
  const GapPhase own = centre->gap_phases.at(k);
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      if (di == 0 && dj == 0) continue;
      const PhasePoint* other = at(i + di, j + dj);
      if (other && other->ok() && other->gap_phases.at(k) != own) return true;
    }
  return std::any_of(centre->gap_phases.begin(), centre->gap_phases.end(), [own](GapPhase g) { return g != own; });
}

}  // namespace lrk
