#pragma once

#include <random>
#include <string>

#include "semicircle/io.hpp"

namespace testing {

using semicircle::CMatrix;
using semicircle::Complex;

inline std::string fixture(const std::string& name) { return std::string(SEMICIRCLE_FIXTURES) + "/" + name + ".json"; }

inline semicircle::HermitianPencil load(const std::string& name) { return semicircle::io::load_pencil(fixture(name)).pencil; }

inline semicircle::CpMap eta_of(const std::string& name) { return semicircle::covariance_map(load(name)); }

inline CMatrix e(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline CMatrix diag2(Complex a, Complex d) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = d;
  return m;
}

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::mt19937_64 gen;
  std::normal_distribution<double> normal{0.0, 1.0};

  CMatrix gaussian(Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(normal(gen), normal(gen));
    return m;
  }
  CMatrix hermitian(Eigen::Index n) {
    const CMatrix g = gaussian(n);
    return 0.5 * (g + g.adjoint());
  }
  CMatrix pd(Eigen::Index n) {
    const CMatrix g = gaussian(n);
    return g * g.adjoint() / static_cast<double>(n) + 0.2 * CMatrix::Identity(n, n);
  }
  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian(n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }
};

}  // namespace testing
