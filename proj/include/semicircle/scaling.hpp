#pragma once

// Operator Sinkhorn iteration, capacity, symmetric doubly stochastic scaling
// eta(C) = C^{-1}, and the solution manifold {W > 0 : eta(W) W = I}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semicircle/cpmap.hpp"

namespace semicircle {

enum class SinkhornStatus { Converged, Diverged, Budget };

enum class DivergenceReason { None, ConditionNumber, Plateau, SublinearRate };

std::string to_string(SinkhornStatus s);
std::string to_string(DivergenceReason r);

struct SinkhornConfig {
  double tol = 1e-10;            // on ds_distance
  int max_iter = 100000;
  double condition_limit = 1e8;  // accumulated scaling condition number
  double plateau_rel = 1e-3;     // minimal relative DS decrease over plateau_window
  int plateau_window = 100;
  int rate_check_start = 1000;   // first doubling checkpoint of the rate test
  int rate_strikes = 3;          // consecutive sublinear checkpoints needed
};

struct SinkhornResult {
  CMatrix c1;
  CMatrix c2;
  std::vector<double> ds_history;  // ds_history[k] = DS after k row/column rounds
  int iterations = 0;
  SinkhornStatus status = SinkhornStatus::Budget;
  DivergenceReason reason = DivergenceReason::None;
  double condition = 1.0;  // max(cond c1, cond c2) at exit

  double final_ds() const { return ds_history.empty() ? 0.0 : ds_history.back(); }
};

/// Alternating row and column normalization. The scaled map
/// S_{c1,c2}(eta) has Kraus operators c1 K_i c2^*.
SinkhornResult sinkhorn(const CpMap& eta, const SinkhornConfig& cfg = {});

/// A pair (D, E) of positive definite matrices with eta(D) = E^{-1} and
/// eta(E) = D^{-1}.
struct TwoCycle {
  CMatrix d;
  CMatrix e;
  double residual_d = 0.0;  // ||eta(D) E - I||_F
  double residual_e = 0.0;  // ||eta(E) D - I||_F
};

/// From a converged Sinkhorn result on a self-adjoint eta:
/// D = c2^* c2, E = c1^* c1.
TwoCycle two_cycle_from_sinkhorn(const CpMap& eta, const SinkhornResult& sr);

enum class CapacityMethod { FixedPoint, GradientDescent, NotAttained };
std::string to_string(CapacityMethod m);

struct CapacityConfig {
  double tol = 1e-12;            // relative FOC residual target
  int max_iter = 20000;
  double condition_limit = 1e8;
};

struct CapacityResult {
  double value = 0.0;
  std::optional<CMatrix> minimizer;  // det = 1 when present
  CapacityMethod method = CapacityMethod::NotAttained;
  double residual = 0.0;  // ||eta^*(eta(C)^{-1}) - C^{-1}||_F
  int iterations = 0;
  double cross_check = 0.0;  // |value_fp - value_gd| / value when both attained
};

/// C <- normalize_det(eta^*(eta(C)^{-1})^{-1}); for self-adjoint eta this is
/// eta(eta(C)^{-1})^{-1}.
CapacityResult capacity_fixed_point(const CpMap& eta, const CapacityConfig& cfg = {},
                                    const std::optional<CMatrix>& start = std::nullopt);

/// Riemannian gradient descent of log det eta(X) - log det X.
CapacityResult capacity_gradient(const CpMap& eta, const CapacityConfig& cfg = {},
                                 const std::optional<CMatrix>& start = std::nullopt);

/// Runs both solvers and cross-checks. Reports the fixed point result when it
/// attains, otherwise gradient descent, otherwise NotAttained with the best
/// upper bound seen.
CapacityResult capacity(const CpMap& eta, const CapacityConfig& cfg = {});

struct ScalingCertificate {
  CMatrix c;
  double residual = 0.0;  // ||eta(C) C - I||_F
  KernelBasis kernel;     // ker(Phi + Id) at C
  bool trace_minimal = false;
  double foc_residual = 0.0;  // max_j |Tr(Y_j C)|
  RMatrix jacobian;           // d x d, filled once trace minimal
};

enum class ScaleStatus { Scaled, NotScalable, Budget };
enum class ScaleMethod { SinkhornMidpoint, GeodesicFixedPoint };
std::string to_string(ScaleStatus s);

struct ScaleConfig {
  SinkhornConfig sinkhorn;
  double residual_target = 1e-9;
  double kernel_tol = 1e-8;
  int max_iter = 100000;  // geodesic fixed point
};

struct SymmetricScaling {
  ScaleStatus status = ScaleStatus::NotScalable;
  std::optional<ScalingCertificate> certificate;
  SinkhornResult sinkhorn;
  std::optional<TwoCycle> cycle;
};

/// Residual ||eta(C) C - I||_F.
double scaling_residual(const CpMap& eta, const CMatrix& c);

/// Damped geodesic iteration C <- gamma_{C -> eta(C)^{-1}}(t), t starting at 1/2
/// and halved whenever the residual would increase.
std::optional<CMatrix> geodesic_fixed_point(const CpMap& eta, const CMatrix& start,
                                            double residual_target, int max_iter);

/// Builds the certificate (kernel, residual) at a given C.
ScalingCertificate make_certificate(const CpMap& eta, const CMatrix& c, double kernel_tol = 1e-8);

/// eta(C) = C^{-1} via the Sinkhorn 2-cycle midpoint (method A), with the
/// geodesic fixed point polishing or replacing it (method B).
SymmetricScaling symmetric_scale(const CpMap& eta, const ScaleConfig& cfg = {},
                                 ScaleMethod method = ScaleMethod::SinkhornMidpoint,
                                 const std::optional<CMatrix>& start = std::nullopt);

/// V = C^{1/2} exp(sum_j s_j Y_j) C^{1/2}.
CMatrix solution_family(const ScalingCertificate& cert, std::span<const double> s);

enum class TraceMinStatus { Converged, Stalled, Budget };

struct TraceMinConfig {
  double foc_target = 1e-7;
  int max_iter = 10000;
  double min_step = 1e-14;
  double residual_target = 1e-9;
  double kernel_tol = 1e-8;
};

struct TraceMinimization {
  ScalingCertificate certificate;
  TraceMinStatus status = TraceMinStatus::Budget;
  int iterations = 0;
};

/// Re-centered descent of Tr over the solution manifold.
TraceMinimization trace_minimizer(const CpMap& eta, const ScalingCertificate& start,
                                  const TraceMinConfig& cfg = {});

/// M_jk = (Tr(Y_j C Y_k) + Tr(Y_k C Y_j)) / 2. Throws PreconditionViolated
/// on a certificate that is not trace minimal.
RMatrix bifurcation_jacobian(const ScalingCertificate& cert);

/// K + C eta(K) C.
CMatrix linearization_apply(const CpMap& eta, const CMatrix& c, const CMatrix& k);
/// L + eta(C L C).
CMatrix linearization_adjoint_apply(const CpMap& eta, const CMatrix& c, const CMatrix& l);

}  // namespace semicircle
