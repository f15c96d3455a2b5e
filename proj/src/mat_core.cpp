#include "semicircle/mat_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace semicircle {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionMismatch(os.str());
  }
}

CMatrix spectral_apply(const HermEig& e, auto&& f) {
  RVector mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) mapped(i) = f(e.values(i));
  CMatrix out = e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return hermitian_part(out);
}

}  // namespace

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

CMatrix hermitian_part(const CMatrix& m) {
  require_square(m, "hermitian_part");
  return (m + m.adjoint()) * 0.5;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

Complex trace(const CMatrix& m) { return m.trace(); }

Complex ntrace(const CMatrix& m) {
  require_square(m, "ntrace");
  return m.trace() / static_cast<double>(m.rows());
}

double normalized_hs_norm(const CMatrix& m) {
  return m.norm() / std::sqrt(static_cast<double>(m.rows()));
}

double hs_inner(const CMatrix& x, const CMatrix& y) { return (x.adjoint() * y).trace().real(); }

HermEig herm_eig(const CMatrix& h) {
  require_square(h, "herm_eig");
  if (!all_finite(h)) throw InvalidInput("herm_eig: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  if (es.info() != Eigen::Success) throw Error("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const CMatrix& h) { return herm_eig(h).values(0); }

double condition_number_pd(const CMatrix& pd) {
  const RVector ev = herm_eig(pd).values;
  if (ev(0) <= 0.0) return std::numeric_limits<double>::infinity();
  return ev(ev.size() - 1) / ev(0);
}

bool is_pd(const CMatrix& h, double floor_rel) {
  if (h.rows() == 0) return false;
  const RVector ev = herm_eig(h).values;
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) > floor_rel * scale && ev(0) > 0.0;
}

void require_pd(const CMatrix& h, double floor_rel, const char* what) {
  if (!is_pd(h, floor_rel)) {
    std::ostringstream os;
    os << what << " is not positive definite (lambda_min below " << floor_rel << " * ||.||_2)";
    throw NotPositiveDefinite(os.str());
  }
}

CMatrix mat_fn(const CMatrix& pd, MatFn f, double floor_rel) {
  require_pd(pd, floor_rel, "mat_fn argument");
  const HermEig e = herm_eig(pd);
  switch (f) {
    case MatFn::Sqrt:
      return spectral_apply(e, [](double x) { return std::sqrt(x); });
    case MatFn::InvSqrt:
      return spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
    case MatFn::Log:
      return spectral_apply(e, [](double x) { return std::log(x); });
    case MatFn::Inv:
      return spectral_apply(e, [](double x) { return 1.0 / x; });
  }
  throw InvalidInput("mat_fn: unknown function");
}

CMatrix pd_pow(const CMatrix& pd, double t, double floor_rel) {
  require_pd(pd, floor_rel, "pd_pow argument");
  return spectral_apply(herm_eig(pd), [t](double x) { return std::pow(x, t); });
}

CMatrix herm_exp(const CMatrix& h) {
  return spectral_apply(herm_eig(h), [](double x) { return std::exp(x); });
}

CMatrix pd_geodesic(const CMatrix& a, const CMatrix& b, double t) {
  if (a.rows() != b.rows()) throw DimensionMismatch("pd_geodesic: size mismatch");
  require_pd(a, kPdFloorRel, "pd_geodesic A");
  require_pd(b, kPdFloorRel, "pd_geodesic B");
  const HermEig ea = herm_eig(a);
  const CMatrix a_half = spectral_apply(ea, [](double x) { return std::sqrt(x); });
  const CMatrix a_inv_half = spectral_apply(ea, [](double x) { return 1.0 / std::sqrt(x); });
  const CMatrix inner = hermitian_part(a_inv_half * b * a_inv_half);
  return hermitian_part(a_half * pd_pow(inner, t, 0.0) * a_half);
}

CMatrix geometric_mean(const CMatrix& a, const CMatrix& b) { return pd_geodesic(a, b, 0.5); }

double pd_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("pd_distance: size mismatch");
  require_pd(a, kPdFloorRel, "pd_distance A");
  require_pd(b, kPdFloorRel, "pd_distance B");
  const CMatrix a_inv_half = mat_fn(a, MatFn::InvSqrt);
  const RVector ev = herm_eig(a_inv_half * b * a_inv_half).values;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::pow(std::log(ev(i)), 2);
  return std::sqrt(acc);
}

double log_det_pd(const CMatrix& pd) {
  require_pd(pd, 0.0, "log_det argument");
  return herm_eig(pd).values.array().log().sum();
}

CMatrix normalize_det(const CMatrix& pd) {
  const double n = static_cast<double>(pd.rows());
  return hermitian_part(pd * std::exp(-log_det_pd(pd) / n));
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) : m_(hermitian_part(m)) {
  if (!all_finite(m_)) throw InvalidInput("HermitianMatrix: non-finite entries");
}

PositiveDefiniteMatrix::PositiveDefiniteMatrix(const CMatrix& m, double floor_rel)
    : m_(hermitian_part(m)) {
  require_pd(m_, floor_rel, "PositiveDefiniteMatrix");
}

}  // namespace semicircle
