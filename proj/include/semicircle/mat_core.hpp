#pragma once

// Dense complex matrices and the geometry of the positive definite cone.
//
// Every matrix function goes through a Hermitian eigendecomposition. Pencil
// sizes handled here are small (n up to a few dozen), so exactness of the
// cone identities matters more than asymptotic cost.

#include <complex>

#include <Eigen/Dense>

#include "semicircle/errors.hpp"

namespace semicircle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Relative floor below which a Hermitian matrix is declared not positive
/// definite: lambda_min <= kPdFloorRel * ||H||_2.
inline constexpr double kPdFloorRel = 1e-12;

bool all_finite(const CMatrix& m);

/// (M + M*) / 2.
CMatrix hermitian_part(const CMatrix& m);

double spectral_norm(const CMatrix& m);

/// Unnormalized trace Tr.
Complex trace(const CMatrix& m);

/// Normalized trace tr = Tr / n.
Complex ntrace(const CMatrix& m);

/// Normalized Hilbert-Schmidt norm ||X||_2 = ||X||_F / sqrt(n).
double normalized_hs_norm(const CMatrix& m);

/// Real inner product <X, Y> = Re Tr(X* Y).
double hs_inner(const CMatrix& x, const CMatrix& y);

struct HermEig {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

/// Eigendecomposition of the Hermitian part of `h`. Throws InvalidInput on
/// non-finite entries.
HermEig herm_eig(const CMatrix& h);

double min_eigenvalue(const CMatrix& h);

/// lambda_max / lambda_min of a positive definite matrix.
double condition_number_pd(const CMatrix& pd);

/// Throws NotPositiveDefinite unless lambda_min(h) > floor_rel * ||h||_2.
void require_pd(const CMatrix& h, double floor_rel = kPdFloorRel, const char* what = "matrix");

bool is_pd(const CMatrix& h, double floor_rel = kPdFloorRel);

enum class MatFn { Sqrt, InvSqrt, Log, Inv };

/// Spectral function of a positive definite matrix.
CMatrix mat_fn(const CMatrix& pd, MatFn f, double floor_rel = kPdFloorRel);

/// pd^t for real t.
CMatrix pd_pow(const CMatrix& pd, double t, double floor_rel = kPdFloorRel);

/// exp of a Hermitian matrix; always positive definite.
CMatrix herm_exp(const CMatrix& h);

/// gamma_{A->B}(t) = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.
CMatrix pd_geodesic(const CMatrix& a, const CMatrix& b, double t);

/// A # B, the geodesic midpoint.
CMatrix geometric_mean(const CMatrix& a, const CMatrix& b);

/// d(A, B) = ||log(A^{-1/2} B A^{-1/2})||_F.
double pd_distance(const CMatrix& a, const CMatrix& b);

/// Normalizes a positive definite matrix to unit determinant.
CMatrix normalize_det(const CMatrix& pd);

/// log det of a positive definite matrix.
double log_det_pd(const CMatrix& pd);

/// A Hermitian matrix, stored symmetrized.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m);

  const CMatrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }

 private:
  CMatrix m_;
};

/// A Hermitian matrix whose smallest eigenvalue clears the positive definite
/// floor. Construction validates.
class PositiveDefiniteMatrix {
 public:
  PositiveDefiniteMatrix() = default;
  explicit PositiveDefiniteMatrix(const CMatrix& m, double floor_rel = kPdFloorRel);

  const CMatrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }

 private:
  CMatrix m_;
};

}  // namespace semicircle
