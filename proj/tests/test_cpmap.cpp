#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "semicircle/cpmap.hpp"

using namespace semicircle;
using testing::e;
using testing::Rng;

namespace {

const Complex kI(0.0, 1.0);

CpMap lr_map() { return testing::eta_of("lr_not_c"); }

}  // namespace

TEST_CASE("lr_not_c covariance map in closed form") {
  const CpMap eta = lr_map();
  Rng rng(5);
  for (int k = 0; k < 5; ++k) {
    const Complex a(rng.normal(rng.gen), 0.0);
    const Complex d(rng.normal(rng.gen), 0.0);
    CHECK((eta.apply(testing::diag2(a, d)) - testing::diag2(3.0 * d, 3.0 * a)).norm() < 1e-13);
  }
  CHECK((eta.apply(e(2, 0, 1)) - (1.0 - 2.0 * kI) * e(2, 1, 0)).norm() < 1e-14);
  CHECK((eta.apply(e(2, 1, 0)) - (1.0 + 2.0 * kI) * e(2, 0, 1)).norm() < 1e-14);
}

TEST_CASE("antisym3 covariance map is (Tr(B) I - B) / 2") {
  const CpMap eta = testing::eta_of("antisym3");
  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const CMatrix b = rng.gaussian(3);
    const CMatrix expected = 0.5 * (trace(b) * CMatrix::Identity(3, 3) - b.transpose());
    // Real antisymmetric generators act by transposition on the traceless part.
    CHECK((eta.apply(b) - expected).norm() < 1e-13);
  }
  CHECK(ds_distance(eta) < 1e-28);
}

TEST_CASE("adjoint duality and positivity") {
  Rng rng(7);
  std::vector<CMatrix> kraus = {rng.gaussian(3), rng.gaussian(3)};
  const CpMap eta(kraus);
  for (int k = 0; k < 20; ++k) {
    const CMatrix x = rng.gaussian(3);
    const CMatrix y = rng.gaussian(3);
    CHECK(std::abs(trace(eta.apply(x) * y) - trace(x * eta.adjoint_apply(y))) < 1e-11);
    CHECK(min_eigenvalue(eta.apply(rng.pd(3))) > 0.0);
  }
  CHECK((eta.adjoint().apply(CMatrix::Identity(3, 3)) - eta.adjoint_apply(CMatrix::Identity(3, 3))).norm() < 1e-13);
}

TEST_CASE("construction validates the Kraus list") {
  CHECK_THROWS_AS(CpMap(std::vector<CMatrix>{}), InvalidInput);
  CHECK_THROWS_AS(CpMap({CMatrix::Zero(2, 2)}), InvalidInput);
  CHECK_THROWS_AS(CpMap({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}), InvalidInput);
  CHECK(CpMap({CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)}).kraus().size() == 1);
  CHECK_THROWS(CpMap::with_hermitian_kraus({e(2, 0, 1)}));
  CHECK(CpMap({e(2, 0, 1) + e(2, 1, 0)}).hermitian_kraus());
}

TEST_CASE("Hermitian Kraus rewrite of a self-adjoint map") {
  Rng rng(8);
  const CMatrix k = rng.gaussian(3);
  const CpMap eta({k, k.adjoint()});
  CHECK(self_adjointness_defect(eta) < 1e-12);
  const CpMap herm = hermitian_kraus(eta);
  CHECK(herm.hermitian_kraus());
  for (int t = 0; t < 5; ++t) {
    const CMatrix x = rng.gaussian(3);
    CHECK((herm.apply(x) - eta.apply(x)).norm() < 1e-11 * x.norm() * k.squaredNorm());
  }
  CHECK_THROWS_AS(hermitian_kraus(CpMap({rng.gaussian(3)})), NotSelfAdjoint);
}

TEST_CASE("scaled map matches its materialization and the DS normalizations") {
  Rng rng(9);
  const CpMap eta({rng.gaussian(3), rng.gaussian(3)});
  const CMatrix c1 = CMatrix::Identity(3, 3) + 0.3 * rng.gaussian(3);
  const CMatrix c2 = CMatrix::Identity(3, 3) + 0.3 * rng.gaussian(3);
  const ScaledMap s = scale(eta, c1, c2);
  const CpMap m = s.materialize();
  for (int t = 0; t < 5; ++t) {
    const CMatrix x = rng.gaussian(3);
    CHECK((s.apply(x) - c1 * eta.apply(c2.adjoint() * x * c2) * c1.adjoint()).norm() < 1e-11);
    CHECK((m.apply(x) - s.apply(x)).norm() < 1e-11);
    CHECK((m.adjoint_apply(x) - s.adjoint_apply(x)).norm() < 1e-11);
  }
  CHECK((row_normalize(eta).apply(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-12);
  CHECK((column_normalize(eta).adjoint_apply(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-12);
  CMatrix singular = CMatrix::Identity(3, 3);
  singular(2, 2) = 1e-13;
  CHECK_THROWS_AS(scale(eta, singular, c2), SingularScaling);
}

TEST_CASE("Hermitian basis coordinates round trip") {
  Rng rng(10);
  const auto basis = hermitian_basis(3);
  CHECK(basis.size() == 9);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      CHECK(std::abs(trace(basis[i] * basis[j]) - (i == j ? 1.0 : 0.0)) < 1e-14);
  const CMatrix h = rng.hermitian(3);
  CHECK((from_hermitian_coordinates(hermitian_coordinates(h), 3) - h).norm() < 1e-13);
}

TEST_CASE("superoperator spectrum of the DS-normalized lr_not_c map") {
  const CpMap eta = lr_map();
  const CMatrix c = CMatrix::Identity(2, 2) / std::sqrt(3.0);
  const RMatrix phi = superoperator_matrix(symmetric_scaling(eta, c));
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (phi + phi.transpose()));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  const double r = std::sqrt(5.0) / 3.0;
  const std::vector<double> expected = {-1.0, -r, r, 1.0};
  for (int i = 0; i < 4; ++i) CHECK(ev[static_cast<std::size_t>(i)] == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("kernel of Phi + Id for lr_not_c") {
  const CpMap eta = lr_map();
  const CMatrix c = CMatrix::Identity(2, 2) / std::sqrt(3.0);
  const KernelBasis kb = neg_unit_eigenspace(symmetric_scaling(eta, c), c);
  REQUIRE(kb.dim() == 1);
  const CMatrix y = testing::diag2(1.0, -1.0) / std::sqrt(2.0);
  CHECK(std::min((kb.basis[0] - y).norm(), (kb.basis[0] + y).norm()) < 1e-12);
  CHECK(kb.spectral_gap == doctest::Approx(1.0 - std::sqrt(5.0) / 3.0).epsilon(1e-10));
  // Away from a DS point the eigenspace is not meaningful.
  CHECK_THROWS_AS(neg_unit_eigenspace(symmetric_scaling(eta, CMatrix::Identity(2, 2)), CMatrix::Identity(2, 2)),
                  PreconditionViolated);
}

TEST_CASE("antisym3 has no -1 eigenvectors") {
  const CpMap eta = testing::eta_of("antisym3");
  const CMatrix c = CMatrix::Identity(3, 3);
  const KernelBasis kb = neg_unit_eigenspace(symmetric_scaling(eta, c), c);
  CHECK(kb.dim() == 0);
  CHECK(kb.spectral_gap == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(hermitian_eigenspace(eta, 1.0).dim() == 1);
}
