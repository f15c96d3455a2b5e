#include "semicircle/oracle.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

namespace semicircle::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

struct BruteProblem {
  const CpMap* eta;
};

// det eta(B) for B = exp(a sx + b sy + c sz); the chart is traceless so det B = 1.
double det_objective(const gsl_vector* v, void* params) {
  const auto* problem = static_cast<const BruteProblem*>(params);
  double a = gsl_vector_get(v, 0);
  double b = gsl_vector_get(v, 1);
  double c = gsl_vector_get(v, 2);
  // Past r ~ 10 the determinant cancels catastrophically (error ~ 1e-16 e^{2r}),
  // so project onto the ball. Infima at infinity are then missed by ~ e^{-2R}.
  constexpr double kMaxRadius = 10.0;
  double r = std::sqrt(a * a + b * b + c * c);
  if (r > kMaxRadius) {
    a *= kMaxRadius / r;
    b *= kMaxRadius / r;
    c *= kMaxRadius / r;
    r = kMaxRadius;
  }
  CMatrix h(2, 2);
  h << Complex(c, 0.0), Complex(a, -b), Complex(a, b), Complex(-c, 0.0);
  // exp of a traceless Hermitian 2x2: cosh(r) I + sinh(r)/r H with r = |(a,b,c)|.
  const double sinhc = r < 1e-12 ? 1.0 : std::sinh(r) / r;
  const CMatrix bmat = std::cosh(r) * CMatrix::Identity(2, 2) + sinhc * h;
  const Complex det = problem->eta->apply(bmat).determinant();
  return det.real();
}

}  // namespace

double wigner_density(double x) { return semicircle_density(x, 1.0); }

double semicircle_density(double x, double sigma2) {
  const double r2 = 4.0 * sigma2 - x * x;
  return r2 <= 0.0 ? 0.0 : std::sqrt(r2) / (2.0 * kPi * sigma2);
}

double cubic_edge() { return 1.5 * std::sqrt(3.0); }

std::array<Complex, 3> cubic_roots(Complex z) {
  // Companion matrix of v^3 + c2 v^2 + c1 v + c0 with c2 = -z, c1 = 0, c0 = z.
  CMatrix companion = CMatrix::Zero(3, 3);
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -z;
  companion(1, 2) = 0.0;
  companion(2, 2) = z;
  Eigen::ComplexEigenSolver<CMatrix> es(companion);
  const CVector ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

Complex cubic_boundary_root(double x) {
  if (x == 0.0) throw InvalidInput("cubic_boundary_root: x = 0 is the singular point");
  if (std::abs(x) >= cubic_edge()) throw InvalidInput("cubic_boundary_root: x outside the support");
  // Discriminant z^2 (4 z^2 - 27) < 0 inside the support: one real root and a
  // conjugate pair; the boundary value is the member with Im v > 0.
  const auto roots = cubic_roots(Complex(x, 0.0));
  return *std::max_element(roots.begin(), roots.end(),
                           [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
}

double cubic_density(double x) {
  if (x == 0.0) throw InvalidInput("cubic_density: x = 0 is the singular point");
  const double discriminant = x * x * (4.0 * x * x - 27.0);
  if (discriminant >= 0.0) return 0.0;
  const Complex v = cubic_boundary_root(x);
  return v.imag() / (2.0 * kPi) * (1.0 + 1.0 / std::norm(v));
}

DiagonalFamilyMember diag_family_solution(double t) {
  if (!(t > 0.0)) throw InvalidInput("diag_family_solution: t must be positive");
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = t;
  c(1, 1) = 1.0 / (3.0 * t);
  return {c, true};
}

double brute_capacity(const CpMap& eta, int samples, std::uint64_t seed) {
  if (eta.dim() != 2) throw InvalidInput("brute_capacity: only n = 2 is supported");
  BruteProblem problem{&eta};
  gsl_multimin_function fn{&det_objective, 3, &problem};

  using Minimizer = std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)>;
  using Vector = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
  Minimizer minimizer(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3),
                      &gsl_multimin_fminimizer_free);
  Vector start(gsl_vector_alloc(3), &gsl_vector_free);
  Vector steps(gsl_vector_alloc(3), &gsl_vector_free);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, samples); ++s) {
    for (std::size_t k = 0; k < 3; ++k) {
      gsl_vector_set(start.get(), k, s == 0 ? 0.0 : normal(rng));
      gsl_vector_set(steps.get(), k, 0.5);
    }
    gsl_multimin_fminimizer_set(minimizer.get(), &fn, start.get(), steps.get());
    for (int it = 0; it < 5000; ++it) {
      if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer.get()), 1e-10) == GSL_SUCCESS) break;
    }
    best = std::min(best, gsl_multimin_fminimizer_minimum(minimizer.get()));
  }
  return best;
}

}  // namespace semicircle::oracle
