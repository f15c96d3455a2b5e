#pragma once

// Completely positive maps given by Kraus lists.

#include <vector>

#include "semicircle/mat_core.hpp"

namespace semicircle {

/// Kraus operators with Frobenius norm below this are dropped on construction.
inline constexpr double kZeroKrausNorm = 1e-14;

/// X -> sum_i K_i X K_i^*.
class CpMap {
 public:
  CpMap() = default;

  /// Validates shapes, drops zero operators. Throws InvalidInput if every
  /// operator vanishes or shapes disagree.
  explicit CpMap(std::vector<CMatrix> kraus);

  /// Same as the plain constructor, additionally asserting that every Kraus
  /// operator is Hermitian within 1e-12 (relative).
  static CpMap with_hermitian_kraus(std::vector<CMatrix> kraus);

  Eigen::Index dim() const noexcept { return n_; }
  const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }
  bool hermitian_kraus() const noexcept { return hermitian_kraus_; }

  CMatrix apply(const CMatrix& x) const;
  /// sum_i K_i^* X K_i.
  CMatrix adjoint_apply(const CMatrix& x) const;
  CpMap adjoint() const;

 private:
  Eigen::Index n_ = 0;
  std::vector<CMatrix> kraus_;
  bool hermitian_kraus_ = false;
};

/// X -> c1 eta(c2^* X c2) c1^*, applied lazily.
class ScaledMap {
 public:
  /// Throws SingularScaling if either factor has condition number > 1e12.
  ScaledMap(CpMap base, CMatrix c1, CMatrix c2);

  const CpMap& base() const noexcept { return base_; }
  const CMatrix& c1() const noexcept { return c1_; }
  const CMatrix& c2() const noexcept { return c2_; }
  Eigen::Index dim() const noexcept { return base_.dim(); }

  CMatrix apply(const CMatrix& x) const;
  CMatrix adjoint_apply(const CMatrix& x) const;

  /// Kraus list {c1 K_i c2^*}.
  CpMap materialize() const;

 private:
  CpMap base_;
  CMatrix c1_;
  CMatrix c2_;
};

ScaledMap scale(const CpMap& eta, const CMatrix& c1, const CMatrix& c2);

/// S_{C^{1/2}, C^{1/2}}(eta).
ScaledMap symmetric_scaling(const CpMap& eta, const CMatrix& c);

/// R(eta) = S_{eta(I)^{-1/2}, I}(eta).
CpMap row_normalize(const CpMap& eta);
/// C(eta) = S_{I, eta^*(I)^{-1/2}}(eta).
CpMap column_normalize(const CpMap& eta);

/// Tr[(eta(I) - I)^2] + Tr[(eta^*(I) - I)^2].
double ds_distance(const CpMap& eta);

/// max over a full matrix basis of ||eta(E) - eta^*(E)||_F.
double self_adjointness_defect(const CpMap& eta);

/// Rewrites a self-adjoint map with Hermitian Kraus operators via
/// A_k = H_k + i S_k. Throws NotSelfAdjoint if the defect exceeds 1e-10.
CpMap hermitian_kraus(const CpMap& eta);

/// Orthonormal basis of the real space of n x n Hermitian matrices under
/// Tr(XY): diagonal units, (E_jk + E_kj)/sqrt2, i(E_jk - E_kj)/sqrt2 (j<k).
std::vector<CMatrix> hermitian_basis(Eigen::Index n);

/// Inverse of hermitian_basis coordinates: sum_a v_a E_a.
CMatrix from_hermitian_coordinates(const RVector& v, Eigen::Index n);
RVector hermitian_coordinates(const CMatrix& h);

/// Real n^2 x n^2 matrix M[a][b] = Tr(E_a Phi(E_b)).
RMatrix superoperator_matrix(const CpMap& phi);
RMatrix superoperator_matrix(const ScaledMap& phi);

/// Hermitian eigenspace of a self-adjoint map for one eigenvalue.
struct KernelBasis {
  CMatrix base_point;              // the C defining Phi
  std::vector<CMatrix> basis;      // orthonormal Hermitian Y_j under Tr(XY)
  double eig_tolerance = 1e-8;
  double target = -1.0;            // eigenvalue this basis belongs to
  double spectral_gap = 0.0;       // distance from target to the nearest rejected eigenvalue
  std::vector<double> eigenvalues; // accepted eigenvalues

  int dim() const noexcept { return static_cast<int>(basis.size()); }
};

/// Eigenspace of Phi for eigenvalue `target` over Hermitian matrices;
/// eigenvalues accepted iff |lambda - target| < tol.
KernelBasis hermitian_eigenspace(const CpMap& phi, double target, double tol = 1e-8);

/// ker(Phi + Id) restricted to Hermitian matrices, Phi = S_{C^{1/2},C^{1/2}}(eta).
/// Throws PreconditionViolated if sqrt(DS(Phi)) exceeds sqrt(tol).
KernelBasis neg_unit_eigenspace(const ScaledMap& phi, const CMatrix& c, double tol = 1e-8);

}  // namespace semicircle
