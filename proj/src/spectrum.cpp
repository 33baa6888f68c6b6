#include "lrk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lrk {

EdgeConfig EdgeConfig::for_chain(int n_sites, double omega_edge) {
  EdgeConfig cfg;
  cfg.ell_edge = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_sites)))));
  cfg.omega_edge = omega_edge;
  return cfg;
}

void EdgeConfig::validate(int n_sites) const {
  if (ell_edge < 1 || 2 * ell_edge > n_sites)
    throw std::invalid_argument("ell_edge must satisfy 1 <= ell_edge <= N/2");
  if (!(omega_edge > 0.0 && omega_edge < 1.0))
    throw std::invalid_argument("omega_edge must lie in (0, 1)");
}

std::string to_string(GapPhase phase) {
  return phase == GapPhase::EdgeGap ? "edge" : "bulk";
}

ModeSet diagonalize_bdg(const BdGMatrix& bdg) {
  const int n = bdg.n_sites();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(bdg.matrix, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "BdG eigensolver did not converge (2N = " << 2 * n << ")";
    throw NumericalError(os.str());
  }
  ModeSet modes;
  modes.full_spectrum = solver.eigenvalues();
  // Under particle-hole symmetry the upper half is the nonnegative branch; a
  // zero mode can come out as -1e-16, so clip it.
  modes.energies = solver.eigenvalues().tail(n).cwiseMax(0.0);
  modes.vectors = solver.eigenvectors().rightCols(n);
  modes.norm_scale = bdg.matrix.norm();
  modes.ell_edge = EdgeConfig::for_chain(n).ell_edge;
  if (2 * modes.ell_edge <= n) modes.edge_weights = edge_weights(modes, modes.ell_edge);
  return modes;
}

double edge_weight(const Eigen::Ref<const Eigen::VectorXd>& mode, int ell_edge) {
  const Eigen::Index n = mode.size() / 2;
  if (mode.size() % 2 != 0) throw std::invalid_argument("mode vector must have 2N components");
  if (ell_edge < 1 || 2 * ell_edge > n)
    throw std::invalid_argument("ell_edge must satisfy 1 <= ell_edge <= N/2");
  const auto u = mode.head(n);
  const auto v = mode.tail(n);
  const Eigen::Index l = ell_edge;
  const double w = u.head(l).squaredNorm() + v.head(l).squaredNorm() + u.tail(l).squaredNorm() +
                   v.tail(l).squaredNorm();
  return std::clamp(w, 0.0, 1.0);
}

std::vector<double> edge_weights(const ModeSet& modes, int ell_edge) {
  std::vector<double> out(static_cast<std::size_t>(modes.vectors.cols()));
  for (Eigen::Index k = 0; k < modes.vectors.cols(); ++k)
    out[static_cast<std::size_t>(k)] = edge_weight(modes.vectors.col(k), ell_edge);
  return out;
}

GapClassification classify_gaps(const ModeSet& modes, const EdgeConfig& cfg) {
  cfg.validate(modes.n_sites());
  const std::vector<double> computed =
      cfg.ell_edge == modes.ell_edge && !modes.edge_weights.empty() ? std::vector<double>{}
                                                                   : edge_weights(modes, cfg.ell_edge);
  const std::vector<double>& weights = computed.empty() ? modes.edge_weights : computed;

  GapClassification out;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double e = modes.energies(static_cast<Eigen::Index>(k));
    if (weights[k] > cfg.omega_edge) {
      out.delta_edge = std::min(out.delta_edge, e);
      ++out.edge_mode_count;
    } else {
      out.delta_bulk = std::min(out.delta_bulk, e);
    }
  }
  out.phase = out.delta_edge < out.delta_bulk ? GapPhase::EdgeGap : GapPhase::BulkGap;
  return out;
}

}  // namespace lrk
