#pragma once

#include "lrk/lanczos.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lrk {

struct DiagnosticsConfig {
  double eta_tol = 0.0;
  int n_min = 2;
  std::optional<int> n_max;  // defaults to floor(n_stable / 2)

  void validate() const;
};

/// eta_n = ln(b_{2n-1} / b_{2n}) over [n_min, n_max], with the sign variable
/// s_n = sgn(eta_n) when |eta_n| > eta_tol and 0 otherwise.
struct StaggeringSeries {
  int n_min = 0;
  int n_max = 0;
  std::vector<double> eta;
  std::vector<int> signs;
  int n_cross = 0;

  bool krylov_edge() const { return n_cross >= 1; }
};

/// `b` holds b_1..b_K, all of which are treated as stable.
StaggeringSeries staggering(std::span<const double> b, const DiagnosticsConfig& cfg = {});

/// Only the first run.n_stable coefficients are used.
StaggeringSeries staggering(const LanczosRun& run, const DiagnosticsConfig& cfg = {});

/// Uses the cross-checked depth of a dual run.
StaggeringSeries staggering(const DualRun& run, const DiagnosticsConfig& cfg = {});

/// Sign flips between neighbours after dropping zeros.
int crossing_count(std::span<const int> signs);

}  // namespace lrk
