#pragma once

#include "lrk/lanczos.hpp"
#include "lrk/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace lrk {

/// Largest chain the dense many-body oracle accepts (operator space 4^N).
inline constexpr int kOracleMaxSites = 4;

/// Explicit 2^N x 2^N realizations of c_j and g_mu via Jordan-Wigner,
/// c_j = (prod_{l<j} sigma^z_l) sigma^-_j with sigma^z = 2n - 1.
struct ManyBodyBasis {
  int n_sites = 0;
  std::vector<Eigen::MatrixXcd> annihilators;  // c_1..c_N
  std::vector<Eigen::MatrixXcd> gammas;        // g_1..g_{2N}, interleaved per site

  int hilbert_dimension() const { return 1 << n_sites; }
};

/// Throws std::invalid_argument unless 1 <= N <= 4.
ManyBodyBasis build_manybody_majoranas(int n_sites);

/// (i/2) sum HM_{mu nu} g_mu g_nu.
Eigen::MatrixXcd manybody_hamiltonian(const ManyBodyBasis& basis, const MajoranaGenerator& generator);

/// The fermionic Hamiltonian written term by term in c, c^dag, including the
/// constant that the BdG form drops.
Eigen::MatrixXcd fermionic_hamiltonian(const ManyBodyBasis& basis, const ModelParams& params);

struct AlgebraResiduals {
  double anticommutator = 0.0;  // max |{g_mu, g_nu} - delta_{mu nu}|
  double trace_single = 0.0;    // max |Tr g_mu|
  double trace_pair = 0.0;      // max |Tr(g_mu g_nu) - 2^{N-1} delta_{mu nu}|
};

AlgebraResiduals check_algebra(const ManyBodyBasis& basis);

/// max_l || [H, g_l] - i sum_m HM_{m l} g_m ||_F with H the many-body form of HM.
double check_commutator_closure(const ManyBodyBasis& basis, const MajoranaGenerator& generator);

struct ManyBodyLanczosOptions {
  bool hs_prefactor = true;  // <A, B> = 2^-N Tr(A^dag B) when set, Tr(A^dag B) otherwise
  double b_floor = 1e-7;
  int max_steps = 0;         // 0 means the operator-space dimension
};

struct ManyBodyLanczosResult {
  std::vector<double> a;
  std::vector<double> b;
  int krylov_dimension = 0;
  double linear_leakage = 0.0;  // worst relative weight of a Krylov vector outside span{g_mu}
};

/// Lanczos over the full operator space with L = [H, .], full
/// reorthogonalization (two passes) and the Hilbert-Schmidt product.
ManyBodyLanczosResult manybody_lanczos(const ManyBodyBasis& basis, const MajoranaGenerator& generator,
                                       const SeedSpec& seed, const ManyBodyLanczosOptions& opts = {});

/// Every check the oracle knows about, for one parameter point.
struct OracleReport {
  ModelParams params;
  SeedSpec seed;
  AlgebraResiduals algebra;
  double closure_residual = 0.0;
  double hamiltonian_residual = 0.0;  // || H_LRK - H_M - N cos(theta) I ||
  double b_deviation_majorana = 0.0;
  double b_deviation_nambu = 0.0;
  double hs_prefactor_deviation = 0.0;
  double max_abs_a = 0.0;
  double linear_leakage = 0.0;
  int krylov_dimension = 0;
  int single_particle_length = 0;
  bool lengths_match = false;

  bool passed() const;
};

OracleReport oracle_report(const ModelParams& params, const SeedSpec& seed, const LanczosConfig& cfg = {});

}  // namespace lrk
