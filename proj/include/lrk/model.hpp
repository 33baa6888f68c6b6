#pragma once

#include <Eigen/Dense>

#include <string>

namespace lrk {

/// One point of the long-range Kitaev parameter space. Boundaries are always
/// open; there is no periodic variant.
struct ModelParams {
  int n_sites = 100;
  double alpha = 1.0;    // power-law exponent of hopping and pairing
  double theta = 1.0;    // interpolation angle, 0 < theta < pi
  double epsilon = 0.0;  // hopping/pairing imbalance; -1 switches pairing off

  /// Throws std::invalid_argument if any field is outside its domain.
  void validate() const;

  std::string describe() const;
};

/// Hopping/on-site block K (symmetric) and pairing block Delta (antisymmetric).
struct CouplingMatrices {
  Eigen::MatrixXd hopping;
  Eigen::MatrixXd pairing;

  int n_sites() const { return static_cast<int>(hopping.rows()); }

  /// Wraps externally built blocks after checking shape and (anti)symmetry.
  static CouplingMatrices from_blocks(Eigen::MatrixXd hopping, Eigen::MatrixXd pairing);
};

/// 2N x 2N BdG matrix in the Nambu ordering (c_1..c_N, c_1^dag..c_N^dag),
/// block structure [[K, Delta], [-Delta, -K]]. The additive constant Tr(K)/2
/// of the many-body Hamiltonian is not represented.
struct BdGMatrix {
  Eigen::MatrixXd matrix;

  int n_sites() const { return static_cast<int>(matrix.rows() / 2); }
};

/// Real antisymmetric 2N x 2N matrix HM of H = (i/2) sum HM_{mu nu} g_mu g_nu,
/// with Majoranas interleaved per site: g_{2j-1} = (c_j + c_j^dag)/sqrt2,
/// g_{2j} = (c_j^dag - c_j)/(i sqrt2). Indices here are zero-based.
struct MajoranaGenerator {
  Eigen::MatrixXd matrix;

  int n_sites() const { return static_cast<int>(matrix.rows() / 2); }

  /// The Hermitian single-particle Liouvillian L = i HM.
  Eigen::MatrixXcd liouvillian() const;
};

/// |i-j|^-alpha evaluated as exp(-alpha ln|i-j|).
double power_law(int distance, double alpha);

CouplingMatrices build_coupling_matrices(const ModelParams& params);

BdGMatrix build_bdg(const CouplingMatrices& couplings);

MajoranaGenerator build_majorana_generator(const CouplingMatrices& couplings);

/// The unitary W with g = W Psi (rows: Majoranas, columns: Nambu components).
/// Dense; intended for checks at small N.
Eigen::MatrixXcd majorana_transform(int n_sites);

/// Swaps the particle and hole blocks: tau_x M^T tau_x.
Eigen::MatrixXd particle_hole_conjugate(const Eigen::MatrixXd& bdg);

}  // namespace lrk
