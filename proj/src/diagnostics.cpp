#include "lrk/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lrk {

void DiagnosticsConfig::validate() const {
  if (!(eta_tol >= 0.0) || !std::isfinite(eta_tol)) throw std::invalid_argument("eta_tol must be >= 0");
  if (n_min < 2) throw std::invalid_argument("n_min must be >= 2");
  if (n_max && *n_max < n_min) throw std::invalid_argument("n_max must be >= n_min");
}

StaggeringSeries staggering(std::span<const double> b, const DiagnosticsConfig& cfg) {
  cfg.validate();
  const int stable = static_cast<int>(b.size());
  const int limit = stable / 2;
  if (cfg.n_max && *cfg.n_max > limit)
    throw std::invalid_argument("n_max = " + std::to_string(*cfg.n_max) + " reaches past the stable depth " +
                                std::to_string(stable));
  StaggeringSeries out;
  out.n_min = cfg.n_min;
  out.n_max = cfg.n_max.value_or(limit);
  if (out.n_max < out.n_min)
    throw std::invalid_argument("stable depth " + std::to_string(stable) + " leaves an empty staggering window");

  for (int n = out.n_min; n <= out.n_max; ++n) {
    const double odd = b[static_cast<std::size_t>(2 * n - 2)];
    const double even = b[static_cast<std::size_t>(2 * n - 1)];
    if (!(odd > 0.0 && even > 0.0)) throw std::invalid_argument("staggering needs positive coefficients");
    const double eta = std::log(odd / even);
    out.eta.push_back(eta);
    out.signs.push_back(std::abs(eta) > cfg.eta_tol ? (eta > 0.0 ? 1 : -1) : 0);
  }
  out.n_cross = crossing_count(out.signs);
  return out;
}

StaggeringSeries staggering(const LanczosRun& run, const DiagnosticsConfig& cfg) {
  return staggering(std::span<const double>(run.b.data(), static_cast<std::size_t>(run.n_stable)), cfg);
}

StaggeringSeries staggering(const DualRun& run, const DiagnosticsConfig& cfg) {
  return staggering(std::span<const double>(run.majorana.b.data(), static_cast<std::size_t>(run.stable_depth)),
                    cfg);
}

int crossing_count(std::span<const int> signs) {
  int count = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace lrk
