#pragma once

#include "lrk/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lrk {

/// One term c * g_mu of a seed operator. The Majorana index is one-based and
/// may be anchored to the chain length (g_N, g_{N+1}).
struct SeedTerm {
  int index = 1;
  bool relative_to_n = false;  // index counts from N (index 0 means g_N)
  double coefficient = 1.0;

  int resolve(int n_sites) const { return relative_to_n ? n_sites + index : index; }
};

/// A real linear combination of Majorana operators, normalized before use.
struct SeedSpec {
  std::vector<SeedTerm> terms;

  static SeedSpec gamma(int index);
  static SeedSpec edge();        // g_1
  static SeedSpec edge_pair();   // g_1 + g_2
  static SeedSpec mid();         // g_N
  static SeedSpec mid_pair();    // g_N + g_{N+1}

  /// Parses "gamma1", "gamma1+gamma2", "gammaN", "gammaN+gammaN+1",
  /// "0.5*gamma3+gamma4". Throws std::invalid_argument otherwise.
  static SeedSpec parse(std::string_view text);

  /// Unit-norm real coefficient vector over the 2N Majoranas (zero-based).
  Eigen::VectorXd majorana_vector(int n_sites) const;

  /// The same operator in the Nambu basis: x = W^T u.
  Eigen::VectorXcd nambu_vector(int n_sites) const;

  std::string to_string() const;
};

/// The four seeds used for robustness checks.
std::vector<SeedSpec> standard_seeds();

struct LanczosConfig {
  double reorth_threshold = 1e-10;   // project out v_j when |<v_j, w>| > p
  double b_floor = 1e-7;
  double orthogonality_tol = 1e-7;
  double cross_check_tol = 1e-7;
  int max_steps = 0;                 // 0 means 2N
  double metric_scale = 1.0;         // inner product is metric_scale * v^dag w
  bool keep_basis = false;

  void validate() const;
};

enum class Representation { Majorana, Nambu };

enum class Termination { BFloor, OrthoLoss, CrossCheckFail, MaxSteps, ExactBreakdown };

std::string to_string(Representation rep);
std::string to_string(Termination reason);
Termination termination_from_string(std::string_view text);
Representation representation_from_string(std::string_view text);

struct StabilityReport {
  std::vector<double> eps_max;    // eps_n = max_{i<n} |<v_i, v_n>| for each retained v_n
  Termination termination = Termination::MaxSteps;
  int truncation_index = 0;       // last retained b index (one-based)
  double rejected_value = 0.0;    // the b or eps that tripped the gate
};

/// Lanczos coefficients of one recursion. b[k] holds b_{k+1}; a[k] holds a_k
/// for every retained Krylov vector v_k.
struct LanczosRun {
  std::vector<double> a;
  std::vector<double> b;
  int n_stable = 0;
  StabilityReport stability;
  Representation representation = Representation::Majorana;
  std::optional<Eigen::MatrixXcd> basis;  // columns v_0..v_{n_stable} when kept

  int krylov_dimension() const { return n_stable + 1; }
};

LanczosRun lanczos_majorana(const MajoranaGenerator& generator, const SeedSpec& seed,
                            const LanczosConfig& cfg = {});

LanczosRun lanczos_nambu(const BdGMatrix& bdg, const SeedSpec& seed, const LanczosConfig& cfg = {});

/// Largest n with |b_k^A - b_k^B| <= tol for every k <= n.
int cross_check(const LanczosRun& first, const LanczosRun& second, double tol);

/// Both representations for one parameter point, with the depth every
/// downstream diagnostic may use.
struct DualRun {
  LanczosRun majorana;
  LanczosRun nambu;
  int cross_checked = 0;
  int stable_depth = 0;
  Termination termination = Termination::MaxSteps;

  /// Majorana b_1..b_{stable_depth}.
  std::vector<double> stable_b() const;
};

DualRun lanczos_dual(const CouplingMatrices& couplings, const SeedSpec& seed,
                     const LanczosConfig& cfg = {});

/// Real symmetric tridiagonal Krylov matrix with zero diagonal.
struct TridiagonalT {
  std::vector<double> off_diagonal;

  int dimension() const { return static_cast<int>(off_diagonal.size()) + 1; }
  Eigen::MatrixXd dense() const;
};

TridiagonalT build_tridiagonal(const LanczosRun& run);
TridiagonalT build_tridiagonal(std::vector<double> b);

struct KrylovState {
  Eigen::VectorXcd amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

/// phi(t) = exp(i T t) e_0 via the eigendecomposition of T.
KrylovState evolve_krylov(const TridiagonalT& t_matrix, double time);

}  // namespace lrk
