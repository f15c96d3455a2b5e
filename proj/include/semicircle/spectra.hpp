#pragma once

// Half-plane Speicher equation eta(W) W + u W = I, Cauchy transform, and the
// spectral density of the matrix semicircle obtained by Stieltjes inversion.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semicircle/cpmap.hpp"
#include "semicircle/scaling.hpp"

namespace semicircle {

struct HfsConfig {
  double tol = 1e-12;     // on ||eta(W) W + u W - I||_F
  int max_iter = 500;     // fixed-point plus Newton iterations
};

struct HfsState {
  Complex u;
  CMatrix w;
  double residual = 0.0;
  double accretivity_margin = 0.0;  // lambda_min(Re W)
  int iterations = 0;
};

/// Unique strictly accretive solution at Re u > 0. Damped fixed point
/// W <- (1 - theta) W + theta (eta(W) + u I)^{-1}, finished by Newton.
/// Throws InvalidInput for Re u <= 0 and ConvergenceFailure on budget.
HfsState hfs_solve(const CpMap& eta, Complex u, const std::optional<CMatrix>& w_init = std::nullopt,
                   const HfsConfig& cfg = {});

/// Warm-started solves along a path (Re u decreasing).
std::vector<HfsState> hfs_continuation(const CpMap& eta, std::span<const Complex> path,
                                       const HfsConfig& cfg = {});

/// Matrix Cauchy transform G(z) = -i W(-i z) for Im z > 0.
CMatrix cauchy_transform(const CpMap& eta, Complex z, const HfsConfig& cfg = {});

/// Default boundary approach path 1e-2, 3e-3, ..., 1e-6.
std::vector<double> default_eps_path();

struct BoundaryLimitConfig {
  double aperture = 1.0;
  double radius = 1.0;
  std::vector<double> eps_path = default_eps_path();
  int extrapolation_order = 2;
  HfsConfig hfs;

  /// Throws InvalidInput unless aperture, radius > 0 and eps_path is strictly
  /// decreasing with every entry in [1e-8, radius].
  void validate() const;
};

enum class PointStatus { Ok, Clamped, Singular, Failed };
std::string to_string(PointStatus s);

struct DensityPoint {
  double value = 0.0;
  PointStatus status = PointStatus::Ok;
  std::vector<double> trace_path;  // Re tr W(eps - i x) along eps_path
};

/// f(x) = lim (1/pi) Re tr W(eps - i x), Richardson-extrapolated in eps.
DensityPoint density_at(const CpMap& eta, double x, const BoundaryLimitConfig& cfg = {});

struct DensityTable {
  std::vector<double> xs;
  std::vector<double> fs;
  std::vector<double> eps_path;
  int extrapolation_order = 2;
  std::vector<PointStatus> status;
};

/// density_at on every grid point; points are independent and evaluated
/// concurrently, the result does not depend on scheduling.
DensityTable density_grid(const CpMap& eta, std::span<const double> xs, const BoundaryLimitConfig& cfg = {},
                          unsigned threads = 0);

std::vector<double> linspace(double lo, double hi, int points);

/// (1/pi) tr(C) for a trace-minimal certificate.
double f0_from_certificate(const ScalingCertificate& cert);

struct FkDeterminant {
  double value = 0.0;      // Delta(S)
  double log_value = 0.0;  // integral of log|x| f(x) dx
  double error_estimate = 0.0;
  double mass = 0.0;
};

/// Fuglede-Kadison determinant exp(int log|x| dmu) from a table covering the
/// support. Singular and failed points are bridged linearly. Throws
/// InvalidInput when |mass - 1| > 1e-3.
FkDeterminant fk_determinant(const DensityTable& table);

/// Trapezoid mass over the regular points of a table.
double table_mass(const DensityTable& table);

struct CuspFit {
  double exponent = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log f against log|x| on x_lo <= |x| <= x_hi,
/// averaged over the two sides. Throws InvalidInput with fewer than 5 points
/// and PreconditionViolated when x_lo < 10 * max(eps_path).
CuspFit cusp_exponent_fit(const DensityTable& table, double x_lo, double x_hi);

struct SupportEdges {
  double lower = 0.0;
  double upper = 0.0;
  bool found = false;
};

/// Outermost transitions of f across `threshold`, refined by bisection on
/// density_at between neighbouring grid points.
SupportEdges support_edges(const CpMap& eta, const DensityTable& table, const BoundaryLimitConfig& cfg = {},
                           double threshold = 1e-6, double x_tol = 1e-7);

}  // namespace semicircle
