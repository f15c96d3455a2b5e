#include "semicircle/cpmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semicircle {

namespace {

constexpr double kHermitianKrausTol = 1e-12;
constexpr double kSelfAdjointTol = 1e-10;
constexpr double kMaxScalingCondition = 1e12;

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

CMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  CMatrix e = CMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

template <typename Map>
RMatrix superoperator_impl(const Map& phi) {
  const Eigen::Index n = phi.dim();
  const std::vector<CMatrix> basis = hermitian_basis(n);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  RMatrix out(m, m);
  double max_imag = 0.0;
  double scale = 0.0;
  for (Eigen::Index b = 0; b < m; ++b) {
    const CMatrix image = phi.apply(basis[b]);
    for (Eigen::Index a = 0; a < m; ++a) {
      const Complex v = (basis[a] * image).trace();
      out(a, b) = v.real();
      max_imag = std::max(max_imag, std::abs(v.imag()));
      scale = std::max(scale, std::abs(v.real()));
    }
  }
  if (max_imag > 1e-10 * std::max(1.0, scale))
    throw PreconditionViolated("superoperator_matrix: map does not preserve Hermiticity");
  return out;
}

}  // namespace

CpMap::CpMap(std::vector<CMatrix> kraus) {
  if (kraus.empty()) throw InvalidInput("CpMap: empty Kraus list");
  n_ = kraus.front().rows();
  for (const CMatrix& k : kraus) {
    if (k.rows() != n_ || k.cols() != n_)
      throw InvalidInput("CpMap: Kraus operators must all be n x n");
    if (!all_finite(k)) throw InvalidInput("CpMap: non-finite Kraus entries");
    if (k.norm() >= kZeroKrausNorm) kraus_.push_back(k);
  }
  if (kraus_.empty()) throw InvalidInput("CpMap: every Kraus operator is zero");
  hermitian_kraus_ = std::all_of(kraus_.begin(), kraus_.end(), [](const CMatrix& k) {
    return (k - k.adjoint()).norm() <= kHermitianKrausTol * std::max(1.0, k.norm());
  });
}

CpMap CpMap::with_hermitian_kraus(std::vector<CMatrix> kraus) {
  CpMap map(std::move(kraus));
  if (!map.hermitian_kraus_) throw InvalidInput("CpMap: Kraus operators are not Hermitian");
  for (CMatrix& k : map.kraus_) k = hermitian_part(k);
  return map;
}

CMatrix CpMap::apply(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw DimensionMismatch("CpMap::apply: size mismatch");
  CMatrix out = CMatrix::Zero(n_, n_);
  for (const CMatrix& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

CMatrix CpMap::adjoint_apply(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw DimensionMismatch("CpMap::adjoint_apply: size mismatch");
  CMatrix out = CMatrix::Zero(n_, n_);
  for (const CMatrix& k : kraus_) out.noalias() += k.adjoint() * x * k;
  return out;
}

CpMap CpMap::adjoint() const {
  std::vector<CMatrix> adj;
  adj.reserve(kraus_.size());
  for (const CMatrix& k : kraus_) adj.push_back(k.adjoint());
  return CpMap(std::move(adj));
}

ScaledMap::ScaledMap(CpMap base, CMatrix c1, CMatrix c2)
    : base_(std::move(base)), c1_(std::move(c1)), c2_(std::move(c2)) {
  const Eigen::Index n = base_.dim();
  if (c1_.rows() != n || c1_.cols() != n || c2_.rows() != n || c2_.cols() != n)
    throw DimensionMismatch("ScaledMap: scaling matrices must be n x n");
  if (!all_finite(c1_) || !all_finite(c2_)) throw InvalidInput("ScaledMap: non-finite scaling");
  if (condition_number(c1_) > kMaxScalingCondition || condition_number(c2_) > kMaxScalingCondition)
    throw SingularScaling("ScaledMap: scaling matrix is singular or too ill-conditioned");
}

CMatrix ScaledMap::apply(const CMatrix& x) const {
  return c1_ * base_.apply(c2_.adjoint() * x * c2_) * c1_.adjoint();
}

CMatrix ScaledMap::adjoint_apply(const CMatrix& x) const {
  return c2_ * base_.adjoint_apply(c1_.adjoint() * x * c1_) * c2_.adjoint();
}

CpMap ScaledMap::materialize() const {
  std::vector<CMatrix> kraus;
  kraus.reserve(base_.kraus().size());
  for (const CMatrix& k : base_.kraus()) kraus.push_back(c1_ * k * c2_.adjoint());
  return CpMap(std::move(kraus));
}

ScaledMap scale(const CpMap& eta, const CMatrix& c1, const CMatrix& c2) {
  return ScaledMap(eta, c1, c2);
}

ScaledMap symmetric_scaling(const CpMap& eta, const CMatrix& c) {
  const CMatrix half = mat_fn(c, MatFn::Sqrt);
  return ScaledMap(eta, half, half);
}

CpMap row_normalize(const CpMap& eta) {
  const Eigen::Index n = eta.dim();
  const CMatrix left = mat_fn(eta.apply(CMatrix::Identity(n, n)), MatFn::InvSqrt);
  return scale(eta, left, CMatrix::Identity(n, n)).materialize();
}

CpMap column_normalize(const CpMap& eta) {
  const Eigen::Index n = eta.dim();
  const CMatrix right = mat_fn(eta.adjoint_apply(CMatrix::Identity(n, n)), MatFn::InvSqrt);
  return scale(eta, CMatrix::Identity(n, n), right).materialize();
}

double ds_distance(const CpMap& eta) {
  const Eigen::Index n = eta.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix row = eta.apply(id) - id;
  const CMatrix col = eta.adjoint_apply(id) - id;
  return (row * row).trace().real() + (col * col).trace().real();
}

double self_adjointness_defect(const CpMap& eta) {
  const Eigen::Index n = eta.dim();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const CMatrix e = matrix_unit(n, i, j);
      worst = std::max(worst, (eta.apply(e) - eta.adjoint_apply(e)).norm());
    }
  return worst;
}

CpMap hermitian_kraus(const CpMap& eta) {
  if (eta.hermitian_kraus()) return eta;
  double scale = 0.0;
  for (const CMatrix& k : eta.kraus()) scale += k.squaredNorm();
  const double defect = self_adjointness_defect(eta);
  if (defect > kSelfAdjointTol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "hermitian_kraus: map is not self-adjoint (defect " << defect << ")";
    throw NotSelfAdjoint(os.str());
  }
  // For self-adjoint eta, eta = (eta + eta^*)/2 and A X A^* + A^* X A = 2(H X H + S X S)
  // with A = H + iS, so {H_k, S_k} is a Hermitian Kraus list for eta.
  std::vector<CMatrix> out;
  const Complex half_i(0.0, 0.5);
  for (const CMatrix& a : eta.kraus()) {
    CMatrix h = (a + a.adjoint()) * 0.5;
    CMatrix s = (a - a.adjoint()) * (-half_i);
    if (h.norm() >= kZeroKrausNorm) out.push_back(hermitian_part(h));
    if (s.norm() >= kZeroKrausNorm) out.push_back(hermitian_part(s));
  }
  return CpMap::with_hermitian_kraus(std::move(out));
}

std::vector<CMatrix> hermitian_basis(Eigen::Index n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) basis.push_back(matrix_unit(n, i, i));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(j, k) = r;
      sym(k, j) = r;
      basis.push_back(sym);
      CMatrix anti = CMatrix::Zero(n, n);
      anti(j, k) = Complex(0.0, r);
      anti(k, j) = Complex(0.0, -r);
      basis.push_back(anti);
    }
  return basis;
}

CMatrix from_hermitian_coordinates(const RVector& v, Eigen::Index n) {
  const std::vector<CMatrix> basis = hermitian_basis(n);
  if (v.size() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatch("from_hermitian_coordinates: wrong coordinate count");
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t a = 0; a < basis.size(); ++a) out += v(static_cast<Eigen::Index>(a)) * basis[a];
  return hermitian_part(out);
}

RVector hermitian_coordinates(const CMatrix& h) {
  const std::vector<CMatrix> basis = hermitian_basis(h.rows());
  RVector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a)
    v(static_cast<Eigen::Index>(a)) = (basis[a] * h).trace().real();
  return v;
}

RMatrix superoperator_matrix(const CpMap& phi) { return superoperator_impl(phi); }
RMatrix superoperator_matrix(const ScaledMap& phi) { return superoperator_impl(phi); }

KernelBasis hermitian_eigenspace(const CpMap& phi, double target, double tol) {
  const Eigen::Index n = phi.dim();
  const RMatrix m = superoperator_matrix(phi);
  // Phi self-adjoint makes m symmetric; the symmetric part is what we diagonalize.
  const RMatrix sym = 0.5 * (m + m.transpose());
  if ((m - sym).norm() > 1e-8 * std::max(1.0, m.norm()))
    throw NotSelfAdjoint("hermitian_eigenspace: map is not self-adjoint");
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  KernelBasis out;
  out.eig_tolerance = tol;
  out.target = target;
  out.spectral_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (std::abs(lambda - target) < tol) {
      out.basis.push_back(from_hermitian_coordinates(es.eigenvectors().col(i), n));
      out.eigenvalues.push_back(lambda);
    } else {
      out.spectral_gap = std::min(out.spectral_gap, std::abs(lambda - target));
    }
  }
  return out;
}

KernelBasis neg_unit_eigenspace(const ScaledMap& phi, const CMatrix& c, double tol) {
  const CpMap materialized = phi.materialize();
  const double ds = ds_distance(materialized);
  if (std::sqrt(ds) > std::sqrt(tol)) {
    std::ostringstream os;
    os << "neg_unit_eigenspace: map is not doubly stochastic (DS distance " << ds << ")";
    throw PreconditionViolated(os.str());
  }
  KernelBasis kernel = hermitian_eigenspace(materialized, -1.0, tol);
  kernel.base_point = c;
  return kernel;
}

}  // namespace semicircle
