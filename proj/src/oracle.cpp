#include "lrk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lrk {

namespace {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

constexpr double kAlgebraTol = 1e-12;
constexpr double kClosureTol = 1e-12;
constexpr double kSequenceTol = 1e-10;
constexpr double kDiagonalTol = 1e-12;
constexpr double kLeakageTol = 1e-10;

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Hilbert-Schmidt product, optionally with the 2^-N prefactor.
cplx hs(const Mat& x, const Mat& y, double prefactor) {
  return prefactor * (x.adjoint() * y).trace();
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t len = std::min(x.size(), y.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
  return worst;
}

}  // namespace

ManyBodyBasis build_manybody_majoranas(int n_sites) {
  if (n_sites < 1 || n_sites > kOracleMaxSites)
    throw std::invalid_argument("many-body oracle supports 1 <= N <= " + std::to_string(kOracleMaxSites) +
                                ", got " + std::to_string(n_sites));
  // Local basis: index 0 is occupied (sigma^z = +1), index 1 empty.
  Mat z(2, 2), lower(2, 2);
  const Mat id = Mat::Identity(2, 2);
  z << 1, 0, 0, -1;
  lower << 0, 0, 1, 0;

  ManyBodyBasis basis;
  basis.n_sites = n_sites;
  const double r = 1.0 / std::numbers::sqrt2;
  for (int j = 0; j < n_sites; ++j) {
    Mat c = Mat::Identity(1, 1);
    for (int l = 0; l < n_sites; ++l) c = kron(c, l < j ? z : (l == j ? lower : id));
    const Mat cd = c.adjoint();
    basis.gammas.push_back(r * (c + cd));
    basis.gammas.push_back(cplx(0.0, -r) * (cd - c));
    basis.annihilators.push_back(c);
  }
  return basis;
}

Eigen::MatrixXcd manybody_hamiltonian(const ManyBodyBasis& basis, const MajoranaGenerator& generator) {
  const int m = 2 * basis.n_sites;
  if (generator.matrix.rows() != m) throw std::invalid_argument("generator size does not match the basis");
  const int dim = basis.hilbert_dimension();
  Mat h = Mat::Zero(dim, dim);
  for (int mu = 0; mu < m; ++mu)
    for (int nu = 0; nu < m; ++nu)
      if (generator.matrix(mu, nu) != 0.0)
        h += (0.5 * generator.matrix(mu, nu)) * basis.gammas[mu] * basis.gammas[nu];
  return cplx(0.0, 1.0) * h;
}

Eigen::MatrixXcd fermionic_hamiltonian(const ManyBodyBasis& basis, const ModelParams& params) {
  params.validate();
  if (params.n_sites != basis.n_sites) throw std::invalid_argument("params and basis disagree on N");
  const int n = params.n_sites;
  const int dim = basis.hilbert_dimension();
  const double s = std::sin(params.theta);
  Mat h = Mat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const Mat& ci = basis.annihilators[i];
    h += 2.0 * std::cos(params.theta) * ci.adjoint() * ci;
    for (int j = i + 1; j < n; ++j) {
      const Mat& cj = basis.annihilators[j];
      const Mat term = ci.adjoint() * cj + (1.0 + params.epsilon) * ci * cj;
      h += (s * power_law(j - i, params.alpha)) * (term + term.adjoint());
    }
  }
  return h;
}

AlgebraResiduals check_algebra(const ManyBodyBasis& basis) {
  AlgebraResiduals out;
  const int dim = basis.hilbert_dimension();
  const double half_dim = 0.5 * dim;
  const Mat id = Mat::Identity(dim, dim);
  for (std::size_t mu = 0; mu < basis.gammas.size(); ++mu) {
    const Mat& g = basis.gammas[mu];
    out.trace_single = std::max(out.trace_single, std::abs(g.trace()));
    for (std::size_t nu = 0; nu < basis.gammas.size(); ++nu) {
      const Mat& h = basis.gammas[nu];
      const double delta = mu == nu ? 1.0 : 0.0;
      const Mat anti = g * h + h * g - delta * id;
      out.anticommutator = std::max(out.anticommutator, anti.cwiseAbs().maxCoeff());
      out.trace_pair = std::max(out.trace_pair, std::abs((g * h).trace() - delta * half_dim));
    }
  }
  return out;
}

double check_commutator_closure(const ManyBodyBasis& basis, const MajoranaGenerator& generator) {
  const Mat h = manybody_hamiltonian(basis, generator);
  const int m = 2 * basis.n_sites;
  double worst = 0.0;
  for (int l = 0; l < m; ++l) {
    Mat rhs = Mat::Zero(h.rows(), h.cols());
    for (int k = 0; k < m; ++k) rhs += generator.matrix(k, l) * basis.gammas[k];
    const Mat residual = h * basis.gammas[l] - basis.gammas[l] * h - cplx(0.0, 1.0) * rhs;
    worst = std::max(worst, residual.norm());
  }
  return worst;
}

ManyBodyLanczosResult manybody_lanczos(const ManyBodyBasis& basis, const MajoranaGenerator& generator,
                                       const SeedSpec& seed, const ManyBodyLanczosOptions& opts) {
  const int n = basis.n_sites;
  const int dim = basis.hilbert_dimension();
  const double pre = opts.hs_prefactor ? 1.0 / dim : 1.0;
  const int max_steps = opts.max_steps > 0 ? opts.max_steps : dim * dim;
  const Mat h = manybody_hamiltonian(basis, generator);
  auto liouvillian = [&h](const Mat& x) -> Mat { return h * x - x * h; };
  auto norm = [pre](const Mat& x) { return std::sqrt(hs(x, x, pre).real()); };

  const Eigen::VectorXd u = seed.majorana_vector(n);
  Mat v0 = Mat::Zero(dim, dim);
  for (int mu = 0; mu < 2 * n; ++mu) v0 += u(mu) * basis.gammas[mu];

  std::vector<Mat> krylov{v0 / norm(v0)};
  ManyBodyLanczosResult out;
  for (int k = 0;; ++k) {
    Mat w = liouvillian(krylov[k]);
    out.a.push_back(hs(krylov[k], w, pre).real());
    if (static_cast<int>(out.b.size()) == max_steps) break;
    w -= out.a.back() * krylov[k];
    if (k > 0) w -= out.b.back() * krylov[k - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (const Mat& v : krylov) w -= hs(v, w, pre) * v;
    const double b = norm(w);
    if (b <= opts.b_floor) break;
    out.b.push_back(b);
    krylov.push_back(w / b);
  }
  out.krylov_dimension = static_cast<int>(krylov.size());

  // The g_mu are HS-orthogonal with norm^2 = pre * 2^{N-1}.
  const double g_norm2 = pre * 0.5 * dim;
  for (const Mat& v : krylov) {
    Mat residual = v;
    for (const Mat& g : basis.gammas) residual -= (hs(g, v, pre) / g_norm2) * g;
    out.linear_leakage = std::max(out.linear_leakage, norm(residual) / norm(v));
  }
  return out;
}

bool OracleReport::passed() const {
  return algebra.anticommutator <= kAlgebraTol && algebra.trace_single <= kAlgebraTol &&
         algebra.trace_pair <= kAlgebraTol && closure_residual <= kClosureTol &&
         hamiltonian_residual <= kAlgebraTol && b_deviation_majorana <= kSequenceTol &&
         b_deviation_nambu <= kSequenceTol && hs_prefactor_deviation <= kAlgebraTol &&
         max_abs_a <= kDiagonalTol && linear_leakage <= kLeakageTol && lengths_match &&
         krylov_dimension <= 2 * params.n_sites;
}

OracleReport oracle_report(const ModelParams& params, const SeedSpec& seed, const LanczosConfig& cfg) {
  OracleReport out;
  out.params = params;
  out.seed = seed;
  const ManyBodyBasis basis = build_manybody_majoranas(params.n_sites);
  const CouplingMatrices couplings = build_coupling_matrices(params);
  const MajoranaGenerator generator = build_majorana_generator(couplings);

  out.algebra = check_algebra(basis);
  out.closure_residual = check_commutator_closure(basis, generator);
  const int dim = basis.hilbert_dimension();
  const Mat shift = (params.n_sites * std::cos(params.theta)) * Mat::Identity(dim, dim);
  out.hamiltonian_residual =
      (fermionic_hamiltonian(basis, params) - manybody_hamiltonian(basis, generator) - shift).cwiseAbs().maxCoeff();

  const ManyBodyLanczosResult with_pre = manybody_lanczos(basis, generator, seed, {true, cfg.b_floor, 0});
  const ManyBodyLanczosResult without_pre = manybody_lanczos(basis, generator, seed, {false, cfg.b_floor, 0});
  const LanczosRun maj = lanczos_majorana(generator, seed, cfg);
  const LanczosRun nam = lanczos_nambu(build_bdg(couplings), seed, cfg);

  out.b_deviation_majorana = max_abs_diff(with_pre.b, maj.b);
  out.b_deviation_nambu = max_abs_diff(with_pre.b, nam.b);
  out.hs_prefactor_deviation = max_abs_diff(with_pre.b, without_pre.b);
  for (double a : with_pre.a) out.max_abs_a = std::max(out.max_abs_a, std::abs(a));
  for (double a : maj.a) out.max_abs_a = std::max(out.max_abs_a, std::abs(a));
  for (double a : nam.a) out.max_abs_a = std::max(out.max_abs_a, std::abs(a));
  out.linear_leakage = with_pre.linear_leakage;
  out.krylov_dimension = with_pre.krylov_dimension;
  out.single_particle_length = maj.n_stable;
  out.lengths_match = with_pre.b.size() == maj.b.size() && maj.b.size() == nam.b.size() &&
                      without_pre.b.size() == with_pre.b.size();
  return out;
}

}  // namespace lrk
