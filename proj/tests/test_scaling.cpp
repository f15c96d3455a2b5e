#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "semicircle/oracle.hpp"
#include "semicircle/scaling.hpp"

using namespace semicircle;
using testing::Rng;

namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

}  // namespace

TEST_CASE("Sinkhorn on lr_not_c reaches DS in one round") {
  const CpMap eta = testing::eta_of("lr_not_c");
  const SinkhornResult sr = sinkhorn(eta);
  CHECK(sr.status == SinkhornStatus::Converged);
  CHECK(sr.iterations <= 2);
  CHECK(sr.final_ds() < 1e-20);
  CHECK(ds_distance(scale(eta, sr.c1, sr.c2).materialize()) < 1e-20);
  // Row and column factors multiply to 1/sqrt(3) in scale.
  CHECK(std::abs(sr.c1(0, 0) * sr.c2(0, 0)) == doctest::Approx(kInvSqrt3).epsilon(1e-12));

  const TwoCycle cyc = two_cycle_from_sinkhorn(eta, sr);
  CHECK(cyc.residual_d < 1e-10);
  CHECK(cyc.residual_e < 1e-10);
  CHECK((geometric_mean(cyc.d, cyc.e) - kInvSqrt3 * CMatrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("Sinkhorn diverges on the cusp pencil") {
  const SinkhornResult sr = sinkhorn(testing::eta_of("cusp"));
  CHECK(sr.status == SinkhornStatus::Diverged);
  CHECK(sr.reason != DivergenceReason::None);
}

TEST_CASE("Sinkhorn reports the condition limit on a rank-decreasing map") {
  // A1 = A2 = E11 kills E22: not full, DS scaling impossible.
  std::vector<CMatrix> k = {testing::e(2, 0, 0), testing::e(2, 0, 0) + testing::e(2, 0, 1) + testing::e(2, 1, 0)};
  SinkhornConfig cfg;
  cfg.max_iter = 20000;
  const SinkhornResult sr = sinkhorn(CpMap(k), cfg);
  CHECK(sr.status != SinkhornStatus::Converged);
}

TEST_CASE("Sinkhorn converges geometrically on random maps") {
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    const SinkhornResult sr = sinkhorn(CpMap({rng.gaussian(3), rng.gaussian(3), rng.gaussian(3)}));
    CHECK(sr.status == SinkhornStatus::Converged);
    CHECK(sr.iterations < 2000);
    CHECK(sr.final_ds() <= 1e-10);
  }
}

TEST_CASE("capacity of lr_not_c is 9 by both solvers") {
  const CpMap eta = testing::eta_of("lr_not_c");
  const CapacityResult fp = capacity_fixed_point(eta);
  const CapacityResult gd = capacity_gradient(eta);
  CHECK(fp.value == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(gd.value == doctest::Approx(9.0).epsilon(1e-7));
  REQUIRE(fp.minimizer);
  CHECK(std::abs(fp.minimizer->determinant() - 1.0) < 1e-10);
  const CapacityResult both = capacity(eta);
  CHECK(both.method != CapacityMethod::NotAttained);
  CHECK(both.cross_check < 1e-6);
}

TEST_CASE("capacity of a DS map is 1") {
  CHECK(capacity(testing::eta_of("antisym3")).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("capacity of the cusp pencil is 1 and not attained") {
  const CapacityResult r = capacity(testing::eta_of("cusp"));
  CHECK(r.method == CapacityMethod::NotAttained);
  CHECK_FALSE(r.minimizer.has_value());
  CHECK(r.value >= 1.0 - 1e-9);
  CHECK(r.value <= 1.0 + 1e-3);
}

TEST_CASE("capacity vanishes for a rank-decreasing map") {
  const CpMap eta({testing::e(2, 0, 0)});
  CHECK(capacity(eta).value == 0.0);
}

TEST_CASE("capacity scaling law with |det|^2 factors") {
  Rng rng(12);
  const CpMap eta = testing::eta_of("lr_not_c");
  for (int t = 0; t < 10; ++t) {
    const CMatrix c1 = CMatrix::Identity(2, 2) + 0.3 * rng.gaussian(2);
    const CMatrix c2 = CMatrix::Identity(2, 2) + 0.3 * rng.gaussian(2);
    const double factor = std::norm(c1.determinant()) * std::norm(c2.determinant());
    const double scaled = capacity(scale(eta, c1, c2).materialize()).value;
    CHECK(std::abs(scaled - 9.0 * factor) <= 1e-6 * 9.0 * factor);
  }
}

TEST_CASE("symmetric scaling certificates") {
  SUBCASE("antisym3 is already DS") {
    const SymmetricScaling s = symmetric_scale(testing::eta_of("antisym3"));
    REQUIRE(s.status == ScaleStatus::Scaled);
    CHECK((s.certificate->c - CMatrix::Identity(3, 3)).norm() < 1e-9);
    CHECK(s.certificate->residual <= 1e-9);
    CHECK(s.certificate->kernel.dim() == 0);
  }
  SUBCASE("lr_not_c lands on the diagonal family") {
    const CpMap eta = testing::eta_of("lr_not_c");
    for (ScaleMethod m : {ScaleMethod::SinkhornMidpoint, ScaleMethod::GeodesicFixedPoint}) {
      const SymmetricScaling s = symmetric_scale(eta, {}, m);
      REQUIRE(s.status == ScaleStatus::Scaled);
      const CMatrix& c = s.certificate->c;
      CHECK(s.certificate->residual <= 1e-9);
      CHECK(std::abs(c(0, 1)) < 1e-9);
      CHECK(c(0, 0).real() * c(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
      CHECK(s.certificate->kernel.dim() == 1);
    }
  }
  SUBCASE("cusp is not scalable") {
    const SymmetricScaling s = symmetric_scale(testing::eta_of("cusp"));
    CHECK(s.status == ScaleStatus::NotScalable);
    CHECK_FALSE(s.certificate.has_value());
  }
  SUBCASE("geodesic fixed point from a far start") {
    const CpMap eta = testing::eta_of("lr_not_c");
    const auto c = geodesic_fixed_point(eta, testing::diag2(5.0, 0.1), 1e-12, 10000);
    REQUIRE(c);
    CHECK(scaling_residual(eta, *c) <= 1e-12);
  }
}

TEST_CASE("solution family matches the diagonal oracle") {
  const CpMap eta = testing::eta_of("lr_not_c");
  const ScalingCertificate cert = make_certificate(eta, kInvSqrt3 * CMatrix::Identity(2, 2));
  REQUIRE(cert.kernel.dim() == 1);
  for (double s : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
    const double sv[] = {s};
    const CMatrix v = solution_family(cert, sv);
    CHECK(scaling_residual(eta, v) < 1e-12);
    const double t = v(0, 0).real();
    CHECK((v - oracle::diag_family_solution(t).c).norm() < 1e-12);
  }
}

TEST_CASE("trace minimizer on lr_not_c") {
  const CpMap eta = testing::eta_of("lr_not_c");
  const ScalingCertificate start = make_certificate(eta, oracle::diag_family_solution(2.0).c);
  const TraceMinimization tm = trace_minimizer(eta, start);
  CHECK(tm.status == TraceMinStatus::Converged);
  CHECK((tm.certificate.c - kInvSqrt3 * CMatrix::Identity(2, 2)).norm() <= 1e-7);
  CHECK(tm.certificate.foc_residual <= 1e-7);
  CHECK(tm.certificate.trace_minimal);
  const RMatrix jac = bifurcation_jacobian(tm.certificate);
  REQUIRE(jac.rows() == 1);
  CHECK(std::abs(jac(0, 0) - kInvSqrt3) <= 1e-8);
  CHECK_THROWS_AS(bifurcation_jacobian(start), PreconditionViolated);
}

TEST_CASE("linearization and its adjoint are dual") {
  Rng rng(13);
  const CpMap eta = testing::eta_of("lr_not_c");
  const CMatrix c = kInvSqrt3 * CMatrix::Identity(2, 2);
  for (int t = 0; t < 10; ++t) {
    const CMatrix k = rng.hermitian(2);
    const CMatrix l = rng.hermitian(2);
    CHECK(std::abs(hs_inner(linearization_apply(eta, c, k), l) - hs_inner(k, linearization_adjoint_apply(eta, c, l))) <
          1e-12);
  }
  // The tangent to the solution family lies in the kernel of the linearization at C.
  const CMatrix y = testing::diag2(1.0, -1.0);
  CHECK(linearization_apply(eta, c, c * y).norm() < 1e-13);
}
