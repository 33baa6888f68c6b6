#include "lrk/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lrk {

namespace {

using cplx = std::complex<double>;

constexpr double kImagGuard = 1e-13;

// Weights of g_{2j} (odd = false) or g_{2j-1} (odd = true) on c_j and c_j^dag.
struct NambuWeights {
  cplx particle;
  cplx hole;
};

NambuWeights weights(bool odd) {
  const double s = 1.0 / std::numbers::sqrt2;
  if (odd) return {cplx(s, 0.0), cplx(s, 0.0)};
  return {cplx(0.0, s), cplx(0.0, -s)};
}

}  // namespace

void ModelParams::validate() const {
  if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2, got " + std::to_string(n_sites));
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive and finite");
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw std::invalid_argument("theta must lie in the open interval (0, pi)");
  if (!std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite");
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "N=" << n_sites << " alpha=" << alpha << " theta=" << theta
     << " (theta/pi=" << theta / std::numbers::pi << ") epsilon=" << epsilon;
  return os.str();
}

CouplingMatrices CouplingMatrices::from_blocks(Eigen::MatrixXd hopping, Eigen::MatrixXd pairing) {
  if (hopping.rows() != hopping.cols() || pairing.rows() != pairing.cols() ||
      hopping.rows() != pairing.rows())
    throw std::invalid_argument("coupling blocks must be square and of equal size");
  if (hopping.rows() < 1) throw std::invalid_argument("coupling blocks must be non-empty");
  if ((hopping - hopping.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("hopping block must be exactly symmetric");
  if ((pairing + pairing.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("pairing block must be exactly antisymmetric");
  return CouplingMatrices{std::move(hopping), std::move(pairing)};
}

Eigen::MatrixXcd MajoranaGenerator::liouvillian() const {
  return cplx(0.0, 1.0) * matrix.cast<cplx>();
}

double power_law(int distance, double alpha) {
  return std::exp(-alpha * std::log(static_cast<double>(distance)));
}

CouplingMatrices build_coupling_matrices(const ModelParams& params) {
  params.validate();
  const int n = params.n_sites;
  const double s = std::sin(params.theta);
  const double onsite = 2.0 * std::cos(params.theta);
  const double pair = (1.0 + params.epsilon) * s;

  CouplingMatrices c{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    c.hopping(i, i) = onsite;
    for (int j = i + 1; j < n; ++j) {
      const double decay = power_law(j - i, params.alpha);
      c.hopping(i, j) = s * decay;
      c.hopping(j, i) = c.hopping(i, j);
      c.pairing(i, j) = -pair * decay;
      c.pairing(j, i) = -c.pairing(i, j);
    }
  }
  return c;
}

BdGMatrix build_bdg(const CouplingMatrices& couplings) {
  const int n = couplings.n_sites();
  BdGMatrix h{Eigen::MatrixXd(2 * n, 2 * n)};
  h.matrix.topLeftCorner(n, n) = couplings.hopping;
  h.matrix.topRightCorner(n, n) = couplings.pairing;
  h.matrix.bottomLeftCorner(n, n) = -couplings.pairing;
  h.matrix.bottomRightCorner(n, n) = -couplings.hopping.transpose();
  return h;
}

MajoranaGenerator build_majorana_generator(const CouplingMatrices& couplings) {
  const BdGMatrix bdg = build_bdg(couplings);
  const Eigen::MatrixXd& h = bdg.matrix;
  const int n = couplings.n_sites();
  const int dim = 2 * n;

  // HM = -i W H W^dag, exploiting that each row of W touches only c_j and c_j^dag.
  Eigen::MatrixXd hm(dim, dim);
  double worst_imag = 0.0;
  for (int mu = 0; mu < dim; ++mu) {
    const int j = mu / 2;
    const NambuWeights wm = weights(mu % 2 == 0);
    for (int nu = 0; nu < dim; ++nu) {
      const int k = nu / 2;
      const NambuWeights wn = weights(nu % 2 == 0);
      const cplx entry = wm.particle * std::conj(wn.particle) * h(j, k) +
                         wm.particle * std::conj(wn.hole) * h(j, n + k) +
                         wm.hole * std::conj(wn.particle) * h(n + j, k) +
                         wm.hole * std::conj(wn.hole) * h(n + j, n + k);
      const cplx rotated = cplx(0.0, -1.0) * entry;
      worst_imag = std::max(worst_imag, std::abs(rotated.imag()));
      hm(mu, nu) = rotated.real();
    }
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (worst_imag > kImagGuard * scale) {
    std::ostringstream os;
    os << "Majorana generator has imaginary residue " << worst_imag << " (BdG input is not particle-hole symmetric)";
    throw std::runtime_error(os.str());
  }
  MajoranaGenerator out{0.5 * (hm - hm.transpose())};
  return out;
}

Eigen::MatrixXcd majorana_transform(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
  const int dim = 2 * n_sites;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dim, dim);
  for (int mu = 0; mu < dim; ++mu) {
    const int j = mu / 2;
    const NambuWeights wm = weights(mu % 2 == 0);
    w(mu, j) = wm.particle;
    w(mu, n_sites + j) = wm.hole;
  }
  return w;
}

Eigen::MatrixXd particle_hole_conjugate(const Eigen::MatrixXd& bdg) {
  const Eigen::Index n = bdg.rows() / 2;
  const Eigen::MatrixXd t = bdg.transpose();
  Eigen::MatrixXd out(bdg.rows(), bdg.cols());
  out.topLeftCorner(n, n) = t.bottomRightCorner(n, n);
  out.topRightCorner(n, n) = t.bottomLeftCorner(n, n);
  out.bottomLeftCorner(n, n) = t.topRightCorner(n, n);
  out.bottomRightCorner(n, n) = t.topLeftCorner(n, n);
  return out;
}

}  // namespace lrk
