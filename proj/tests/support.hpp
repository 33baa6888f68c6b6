#pragma once

// Independent reference computations and random generators shared by the tests.

#include "lrk/lanczos.hpp"
#include "lrk/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace lrk::testing {

using cplx = std::complex<double>;

/// Deterministic source of random model parameters.
class ParamGen {
 public:
  explicit ParamGen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  ModelParams params(int n_sites) {
    ModelParams p;
    p.n_sites = n_sites;
    p.alpha = uniform(0.2, 3.0);
    p.theta = std::numbers::pi * uniform(0.03, 0.97);
    p.epsilon = uniform(-0.9, 1.0);
    return p;
  }

  std::vector<int> signs(int length) {
    std::vector<int> s(static_cast<std::size_t>(length));
    for (int& x : s) x = integer(-1, 1);
    return s;
  }

  std::vector<double> positive(int length, double lo = 0.1, double hi = 3.0) {
    std::vector<double> v(static_cast<std::size_t>(length));
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// HM from the dense transform: Re(-i W H W^dag), antisymmetrized.
inline Eigen::MatrixXd dense_majorana_generator(const Eigen::MatrixXd& bdg) {
  const Eigen::Index n = bdg.rows() / 2;
  const Eigen::MatrixXcd w = majorana_transform(static_cast<int>(n));
  const Eigen::MatrixXcd m = cplx(0.0, -1.0) * (w * bdg.cast<cplx>() * w.adjoint());
  const Eigen::MatrixXd re = m.real();
  return 0.5 * (re - re.transpose());
}

/// Textbook Lanczos with full Gram-Schmidt (two passes) against every prior
/// vector, for a Hermitian matrix given densely.
inline std::vector<double> reference_lanczos(const Eigen::MatrixXcd& l, Eigen::VectorXcd v0, double floor = 1e-7) {
  std::vector<Eigen::VectorXcd> basis{v0 / v0.norm()};
  std::vector<double> b;
  for (int k = 0; k + 1 < l.rows(); ++k) {
    Eigen::VectorXcd w = l * basis.back();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) w -= v.dot(w) * v;
    const double norm = w.norm();
    if (norm <= floor) break;
    b.push_back(norm);
    basis.push_back(w / norm);
  }
  return b;
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
  return worst;
}

inline Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("lrk_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace lrk::testing
