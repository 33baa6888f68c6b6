#include "lrk/lanczos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lrk {

namespace {

using cplx = std::complex<double>;

/// b_{n+1} counts as an exact breakdown when it collapses by this factor
/// relative to b_n; a gradual approach to the floor is BFloor.
constexpr double kBreakdownRatio = 1e-4;

/// Imaginary residue below which a Nambu seed is treated as real.
constexpr double kRealSeedTol = 1e-14;

double real_part(double x) { return x; }
double real_part(cplx x) { return x.real(); }

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Leaves Krylov vectors untouched.
struct NoProjection {
  template <typename V>
  void operator()(V&, int) const {}
};

/// Particle-hole conjugation C v = tau_x conj(v) on a Nambu vector.
template <typename Scalar>
Vector<Scalar> particle_hole(const Vector<Scalar>& v) {
  const Eigen::Index n = v.size() / 2;
  Vector<Scalar> out(v.size());
  out.head(n) = v.tail(n).conjugate();
  out.tail(n) = v.head(n).conjugate();
  return out;
}

/// A Hermitian seed satisfies C v_0 = sigma v_0, and since C anticommutes with
/// H_BdG every Krylov vector obeys C v_n = (-1)^n sigma v_n. Projecting onto
/// that eigenspace each step removes the rounding drift that would otherwise
/// accumulate in a_n.
template <typename Scalar>
struct ParticleHoleProjection {
  Scalar sigma;

  explicit ParticleHoleProjection(const Vector<Scalar>& seed)
      : sigma(seed.dot(particle_hole(seed)) / seed.squaredNorm()) {
    if (std::abs(std::abs(sigma) - 1.0) > 1e-10)
      throw std::invalid_argument("Nambu seed is not particle-hole symmetric");
    sigma /= std::abs(sigma);
  }

  void operator()(Vector<Scalar>& v, int n) const {
    const Scalar sign = n % 2 == 0 ? sigma : -sigma;
    const Vector<Scalar> mirrored = particle_hole(v);
    v = Scalar(0.5) * (v + conj_of(sign) * mirrored);
  }

 private:
  static double conj_of(double x) { return x; }
  static cplx conj_of(cplx x) { return std::conj(x); }
};

/// The recursion shared by both representations. `apply` maps v to L v;
/// `project` restores the symmetry of the n-th Krylov vector.
template <typename Scalar, typename Apply, typename Project = NoProjection>
LanczosRun run_recursion(Apply&& apply, Vector<Scalar> seed, int max_steps, const LanczosConfig& cfg,
                         Representation rep, const Project& project = {}) {
  const Eigen::Index dim = seed.size();
  const double s = cfg.metric_scale;
  const double root_s = std::sqrt(s);

  LanczosRun run;
  run.representation = rep;
  Matrix<Scalar> basis(dim, max_steps + 1);
  project(seed, 0);
  basis.col(0) = seed / (root_s * seed.norm());
  run.stability.eps_max.push_back(0.0);

  Vector<Scalar> w(dim);
  for (int n = 0;; ++n) {
    w = apply(basis.col(n));
    const double a = s * real_part(basis.col(n).dot(w));
    run.a.push_back(a);
    if (static_cast<int>(run.b.size()) == max_steps) {
      run.stability.termination = Termination::MaxSteps;
      break;
    }

    const double raw_norm = root_s * w.norm();
    w -= a * basis.col(n);
    if (n > 0) w -= run.b.back() * basis.col(n - 1);

    // One pass of partial reorthogonalization against the whole basis.
    const auto prior = basis.leftCols(n + 1);
    const Vector<Scalar> overlaps = s * (prior.adjoint() * w);
    for (Eigen::Index j = 0; j <= n; ++j)
      if (std::abs(overlaps(j)) > cfg.reorth_threshold) w -= overlaps(j) * prior.col(j);
    project(w, n + 1);

    const double b_next = root_s * w.norm();
    if (b_next <= cfg.b_floor) {
      const double reference = n > 0 ? run.b.back() : raw_norm;
      run.stability.termination =
          b_next <= kBreakdownRatio * reference ? Termination::ExactBreakdown : Termination::BFloor;
      run.stability.rejected_value = b_next;
      break;
    }

    const Vector<Scalar> next = w / b_next;
    const double eps = s * (prior.adjoint() * next).cwiseAbs().maxCoeff();
    if (eps > cfg.orthogonality_tol) {
      run.stability.termination = Termination::OrthoLoss;
      run.stability.rejected_value = eps;
      break;
    }

    run.b.push_back(b_next);
    run.stability.eps_max.push_back(eps);
    basis.col(n + 1) = next;
  }

  run.n_stable = static_cast<int>(run.b.size());
  run.stability.truncation_index = run.n_stable;
  if (cfg.keep_basis) run.basis = basis.leftCols(run.n_stable + 1).template cast<cplx>();
  return run;
}

int resolve_max_steps(const LanczosConfig& cfg, int n_sites) {
  const int cap = 2 * n_sites;
  return cfg.max_steps > 0 ? std::min(cfg.max_steps, cap) : cap;
}

void check_seed(const SeedSpec& seed, int n_sites) {
  if (seed.terms.empty()) throw std::invalid_argument("seed has no terms");
  for (const SeedTerm& t : seed.terms) {
    const int mu = t.resolve(n_sites);
    if (mu < 1 || mu > 2 * n_sites)
      throw std::invalid_argument("seed index " + std::to_string(mu) + " outside [1, " +
                                  std::to_string(2 * n_sites) + "]");
  }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string format_coefficient(double c) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  return std::string(buf, res.ptr);
}

}  // namespace

SeedSpec SeedSpec::gamma(int index) { return SeedSpec{{SeedTerm{index, false, 1.0}}}; }
SeedSpec SeedSpec::edge() { return gamma(1); }
SeedSpec SeedSpec::edge_pair() { return SeedSpec{{SeedTerm{1, false, 1.0}, SeedTerm{2, false, 1.0}}}; }
SeedSpec SeedSpec::mid() { return SeedSpec{{SeedTerm{0, true, 1.0}}}; }
SeedSpec SeedSpec::mid_pair() { return SeedSpec{{SeedTerm{0, true, 1.0}, SeedTerm{1, true, 1.0}}}; }

SeedSpec SeedSpec::parse(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return std::invalid_argument("invalid seed '" + std::string(text) + "': " + why);
  };
  SeedSpec out;
  std::size_t pos = 0;
  const std::size_t len = text.size();
  while (true) {
    SeedTerm term;
    // Optional "<coef>*" prefix.
    const std::size_t star = text.find('*', pos);
    const std::size_t gamma_at = text.find("gamma", pos);
    if (star != std::string_view::npos && (gamma_at == std::string_view::npos || star < gamma_at)) {
      const char* first = text.data() + pos;
      const char* last = text.data() + star;
      auto [ptr, ec] = std::from_chars(first, last, term.coefficient);
      if (ec != std::errc() || ptr != last || !std::isfinite(term.coefficient))
        throw fail("bad coefficient");
      pos = star + 1;
    }
    if (text.substr(pos, 5) != "gamma") throw fail("expected 'gamma'");
    pos += 5;
    if (pos < len && text[pos] == 'N') {
      term.relative_to_n = true;
      term.index = 0;
      ++pos;
      // "N+k" / "N-k" when the digits end the term.
      if (pos + 1 < len && (text[pos] == '+' || text[pos] == '-') && is_digit(text[pos + 1])) {
        std::size_t end = pos + 1;
        while (end < len && is_digit(text[end])) ++end;
        if (end == len || text[end] == '+') {
          int k = 0;
          std::from_chars(text.data() + pos + 1, text.data() + end, k);
          term.index = text[pos] == '+' ? k : -k;
          pos = end;
        }
      }
    } else {
      std::size_t end = pos;
      while (end < len && is_digit(text[end])) ++end;
      if (end == pos) throw fail("expected an index or 'N' after 'gamma'");
      std::from_chars(text.data() + pos, text.data() + end, term.index);
      if (term.index < 1) throw fail("Majorana indices start at 1");
      pos = end;
    }
    out.terms.push_back(term);
    if (pos == len) break;
    if (text[pos] != '+') throw fail("expected '+' between terms");
    ++pos;
  }
  return out;
}

Eigen::VectorXd SeedSpec::majorana_vector(int n_sites) const {
  check_seed(*this, n_sites);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n_sites);
  for (const SeedTerm& t : terms) u(t.resolve(n_sites) - 1) += t.coefficient;
  const double norm = u.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("seed coefficients vanish");
  return u / norm;
}

Eigen::VectorXcd SeedSpec::nambu_vector(int n_sites) const {
  const Eigen::VectorXd u = majorana_vector(n_sites);
  const double r = 1.0 / std::numbers::sqrt2;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * n_sites);
  for (int mu = 0; mu < 2 * n_sites; ++mu) {
    const int j = mu / 2;
    if (mu % 2 == 0) {
      x(j) += r * u(mu);
      x(n_sites + j) += r * u(mu);
    } else {
      x(j) += cplx(0.0, r) * u(mu);
      x(n_sites + j) += cplx(0.0, -r) * u(mu);
    }
  }
  return x;
}

std::string SeedSpec::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const SeedTerm& t = terms[k];
    if (k > 0) out += '+';
    if (t.coefficient != 1.0) out += format_coefficient(t.coefficient) + "*";
    out += "gamma";
    if (t.relative_to_n) {
      out += 'N';
      if (t.index > 0) out += "+" + std::to_string(t.index);
      if (t.index < 0) out += std::to_string(t.index);
    } else {
      out += std::to_string(t.index);
    }
  }
  return out;
}

std::vector<SeedSpec> standard_seeds() {
  return {SeedSpec::edge(), SeedSpec::edge_pair(), SeedSpec::mid(), SeedSpec::mid_pair()};
}

void LanczosConfig::validate() const {
  for (double tol : {reorth_threshold, b_floor, orthogonality_tol, cross_check_tol, metric_scale})
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw std::invalid_argument("Lanczos tolerances and metric scale must be positive");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
}

std::string to_string(Representation rep) { return rep == Representation::Majorana ? "majorana" : "nambu"; }

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::BFloor: return "b_floor";
    case Termination::OrthoLoss: return "ortho_loss";
    case Termination::CrossCheckFail: return "cross_check_fail";
    case Termination::MaxSteps: return "max_steps";
    case Termination::ExactBreakdown: return "exact_breakdown";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view text) {
  for (Termination t : {Termination::BFloor, Termination::OrthoLoss, Termination::CrossCheckFail,
                        Termination::MaxSteps, Termination::ExactBreakdown})
    if (to_string(t) == text) return t;
  throw std::invalid_argument("unknown termination reason '" + std::string(text) + "'");
}

Representation representation_from_string(std::string_view text) {
  if (text == "majorana") return Representation::Majorana;
  if (text == "nambu") return Representation::Nambu;
  throw std::invalid_argument("unknown representation '" + std::string(text) + "'");
}

LanczosRun lanczos_majorana(const MajoranaGenerator& generator, const SeedSpec& seed,
                            const LanczosConfig& cfg) {
  cfg.validate();
  const int n = generator.n_sites();
  const Eigen::VectorXcd v0 = seed.majorana_vector(n).cast<cplx>();
  const Eigen::MatrixXd& hm = generator.matrix;
  // L = i HM, applied without forming the complex matrix.
  auto apply = [&hm](const auto& v) -> Eigen::VectorXcd {
    Eigen::VectorXcd out(v.size());
    out.real() = -(hm * v.imag());
    out.imag() = hm * v.real();
    return out;
  };
  return run_recursion<cplx>(apply, v0, resolve_max_steps(cfg, n), cfg, Representation::Majorana);
}

LanczosRun lanczos_nambu(const BdGMatrix& bdg, const SeedSpec& seed, const LanczosConfig& cfg) {
  cfg.validate();
  const int n = bdg.n_sites();
  Eigen::VectorXcd x = seed.nambu_vector(n);
  const Eigen::MatrixXd& h = bdg.matrix;
  const int steps = resolve_max_steps(cfg, n);

  // A global phase does not change the coefficients, so a seed that is real up
  // to one runs in real arithmetic.
  Eigen::Index k = 0;
  x.cwiseAbs().maxCoeff(&k);
  const cplx phase = x(k) / std::abs(x(k));
  const Eigen::VectorXcd rotated = x * std::conj(phase);
  if (rotated.imag().cwiseAbs().maxCoeff() <= kRealSeedTol) {
    auto apply = [&h](const auto& v) -> Eigen::VectorXd { return h * v; };
    const Eigen::VectorXd real_seed = rotated.real();
    return run_recursion<double>(apply, real_seed, steps, cfg, Representation::Nambu,
                                 ParticleHoleProjection<double>(real_seed));
  }
  auto apply = [&h](const auto& v) -> Eigen::VectorXcd {
    Eigen::VectorXcd out(v.size());
    out.real() = h * v.real();
    out.imag() = h * v.imag();
    return out;
  };
  return run_recursion<cplx>(apply, x, steps, cfg, Representation::Nambu, ParticleHoleProjection<cplx>(x));
}

int cross_check(const LanczosRun& first, const LanczosRun& second, double tol) {
  const std::size_t len = std::min(first.b.size(), second.b.size());
  std::size_t k = 0;
  while (k < len && std::abs(first.b[k] - second.b[k]) <= tol) ++k;
  return static_cast<int>(k);
}

std::vector<double> DualRun::stable_b() const {
  return {majorana.b.begin(), majorana.b.begin() + stable_depth};
}

DualRun lanczos_dual(const CouplingMatrices& couplings, const SeedSpec& seed, const LanczosConfig& cfg) {
  DualRun out;
  out.majorana = lanczos_majorana(build_majorana_generator(couplings), seed, cfg);
  out.nambu = lanczos_nambu(build_bdg(couplings), seed, cfg);
  out.cross_checked = cross_check(out.majorana, out.nambu, cfg.cross_check_tol);
  const int shortest = std::min(out.majorana.n_stable, out.nambu.n_stable);
  out.stable_depth = std::min(out.cross_checked, shortest);
  if (out.cross_checked < shortest)
    out.termination = Termination::CrossCheckFail;
  else
    out.termination = out.majorana.n_stable <= out.nambu.n_stable ? out.majorana.stability.termination
                                                                   : out.nambu.stability.termination;
  return out;
}

Eigen::MatrixXd TridiagonalT::dense() const {
  const int dim = dimension();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    t(k, k + 1) = off_diagonal[static_cast<std::size_t>(k)];
    t(k + 1, k) = off_diagonal[static_cast<std::size_t>(k)];
  }
  return t;
}

TridiagonalT build_tridiagonal(const LanczosRun& run) {
  return build_tridiagonal(std::vector<double>(run.b.begin(), run.b.begin() + run.n_stable));
}

TridiagonalT build_tridiagonal(std::vector<double> b) {
  if (b.empty()) throw std::invalid_argument("tridiagonal matrix needs at least one coefficient");
  return TridiagonalT{std::move(b)};
}

KrylovState evolve_krylov(const TridiagonalT& t_matrix, double time) {
  const int dim = t_matrix.dimension();
  const Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(t_matrix.off_diagonal.data(), dim - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver did not converge");
  const Eigen::MatrixXd& q = solver.eigenvectors();
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  Eigen::VectorXcd weights(dim);
  for (int k = 0; k < dim; ++k) weights(k) = q(0, k) * std::exp(cplx(0.0, lambda(k) * time));
  return KrylovState{q.cast<cplx>() * weights};
}

}  // namespace lrk
