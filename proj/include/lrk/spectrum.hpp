#pragma once

#include "lrk/model.hpp"

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrk {

/// Raised when a dense eigensolver or other numerical kernel fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EdgeConfig {
  int ell_edge = 1;          // sites per boundary window
  double omega_edge = 0.1;   // edge-localization threshold on W

  /// ell_edge = floor(sqrt(N)).
  static EdgeConfig for_chain(int n_sites, double omega_edge = 0.1);

  void validate(int n_sites) const;
};

/// Positive branch of the BdG spectrum: N energies in ascending order with the
/// matching eigenvectors (columns, 2N components each).
struct ModeSet {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
  std::vector<double> edge_weights;  // computed with ell_edge below
  int ell_edge = 0;
  double norm_scale = 0.0;           // sqrt(Tr H^2) of the BdG matrix
  Eigen::VectorXd full_spectrum;     // all 2N eigenvalues, ascending

  int n_sites() const { return static_cast<int>(energies.size()); }
};

enum class GapPhase { EdgeGap, BulkGap };

struct GapClassification {
  double delta_edge = std::numeric_limits<double>::infinity();
  double delta_bulk = std::numeric_limits<double>::infinity();
  GapPhase phase = GapPhase::BulkGap;
  int edge_mode_count = 0;
};

std::string to_string(GapPhase phase);

/// Full dense diagonalization; keeps the upper N eigenpairs. Edge weights are
/// filled in with ell_edge = floor(sqrt(N)).
ModeSet diagonalize_bdg(const BdGMatrix& bdg);

/// Fraction of |u|^2 + |v|^2 on the first and last ell_edge sites.
double edge_weight(const Eigen::Ref<const Eigen::VectorXd>& mode, int ell_edge);

std::vector<double> edge_weights(const ModeSet& modes, int ell_edge);

GapClassification classify_gaps(const ModeSet& modes, const EdgeConfig& cfg);

}  // namespace lrk
