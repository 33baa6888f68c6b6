#pragma once

#include "lrk/diagnostics.hpp"
#include "lrk/io.hpp"
#include "lrk/lanczos.hpp"
#include "lrk/spectrum.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lrk {

/// Uniform (alpha, theta) grid. alpha_i = alpha_max * i / P for i = 1..P and
/// theta_j = pi * j / (Q + 1) for j = 1..Q, so alpha includes its upper end
/// and theta stays strictly inside (0, pi).
struct GridSpec {
  int alpha_points = 99;
  double alpha_max = 3.0;
  int theta_points = 99;
  int n_sites = 100;
  double epsilon = -0.2;
  SeedSpec seed = SeedSpec::edge();
  std::vector<double> thresholds{0.05, 0.1, 0.5};
  double report_threshold = 0.1;  // must be one of `thresholds`
  int ell_edge = 0;               // 0 means floor(sqrt(N))
  LanczosConfig lanczos;
  DiagnosticsConfig diagnostics;

  void validate() const;

  double alpha(int i) const;  // one-based
  double theta(int j) const;  // one-based
  int cell_count() const { return alpha_points * theta_points; }
  int report_index() const;
  EdgeConfig edge_config(double omega) const;

  /// Column suffix for a threshold, e.g. 0.05 -> "w005".
  static std::string threshold_tag(double omega);
};

json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const json& j);

struct PhasePoint {
  int i = 0;  // alpha index, one-based
  int j = 0;  // theta index, one-based
  double alpha = 0.0;
  double theta = 0.0;
  int n_cross = 0;
  bool krylov_edge = false;
  std::vector<GapPhase> gap_phases;  // one per GridSpec::thresholds
  double delta_edge = 0.0;           // at the report threshold
  double delta_bulk = 0.0;
  int n_stable = 0;
  Termination termination = Termination::MaxSteps;
  std::optional<std::string> error;  // set when the point could not be evaluated

  bool ok() const { return !error.has_value(); }
  GapPhase krylov_phase() const { return krylov_edge ? GapPhase::EdgeGap : GapPhase::BulkGap; }
};

json to_json(const PhasePoint& p);
PhasePoint phase_point_from_json(const json& j);

/// Evaluates one grid cell. Numerical failures are captured in `error`.
PhasePoint compute_phase_point(const GridSpec& spec, int i, int j);

struct SweepOptions {
  std::filesystem::path out_dir;  // empty: no checkpoint
  int workers = 1;
  bool resume = false;
  int flush_every = 16;
  std::optional<int> max_new_points;  // stop after this many fresh evaluations
};

struct SweepResult {
  std::vector<PhasePoint> points;  // completed cells in row-major (alpha outer) order
  int computed = 0;                // evaluated in this call
  int resumed = 0;                 // taken from the checkpoint
  bool complete = false;
};

/// Row-major grid evaluation with static block partitioning over `workers`
/// threads. With an output directory, completed cells are logged to
/// checkpoint.jsonl (rewritten atomically on every flush) and manifest.json
/// records the grid; resuming against a different grid throws
/// std::invalid_argument.
SweepResult run_sweep(const GridSpec& spec, const SweepOptions& opts = {});

inline constexpr const char* kCheckpointName = "checkpoint.jsonl";
inline constexpr const char* kPhaseCsvName = "phase_diagram.csv";

std::string phase_csv(const GridSpec& spec, const std::vector<PhasePoint>& points);

struct Disagreement {
  int i = 0;
  int j = 0;
  double alpha = 0.0;
  double theta = 0.0;
  GapPhase krylov = GapPhase::BulkGap;
  GapPhase gap = GapPhase::BulkGap;
};

struct AgreementReport {
  double fraction = 0.0;
  int compared = 0;
  int agreeing = 0;
  int failed = 0;  // points with errors, left out of the fraction
  std::vector<Disagreement> disagreements;
};

/// Compares krylov_phase with the gap phase at threshold index `k`.
AgreementReport agreement_report(const std::vector<PhasePoint>& points, std::size_t k);

/// Points indexed by grid position.
class PhaseGrid {
 public:
  PhaseGrid(const GridSpec& spec, const std::vector<PhasePoint>& points);

  const PhasePoint* at(int i, int j) const;

  /// True when some 8-neighbour has the opposite gap phase at threshold index
  /// `k`, or when the cell's own gap phase differs between thresholds.
  bool near_gap_boundary(int i, int j, std::size_t k) const;

 private:
  int p_;
  int q_;
  std::vector<const PhasePoint*> cells_;
};

}  // namespace lrk
