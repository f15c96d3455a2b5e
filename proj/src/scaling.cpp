#include "semicircle/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semicircle {

namespace {

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

// Detects sublinear convergence: at doubling checkpoints the local decay
// exponent log2(m(k/2) / m(k)) stops accelerating while the scaling keeps
// drifting (condition number still growing).
class RateMonitor {
 public:
  RateMonitor(int start, int strikes_needed) : next_(start), strikes_needed_(strikes_needed) {}

  // `history[k]` is the metric after k iterations.
  bool sublinear(const std::vector<double>& history, double condition) {
    const int k = static_cast<int>(history.size()) - 1;
    if (k < next_) return false;
    next_ *= 2;
    const double prev = history[static_cast<std::size_t>(k / 2)];
    const double cur = history[static_cast<std::size_t>(k)];
    if (!(prev > 0.0 && cur > 0.0)) return false;
    const double exponent = std::log2(prev / cur);
    if (have_last_) {
      const bool steady = exponent < 1.5 * last_exponent_;
      const bool drifting = condition > 1.1 * last_condition_;
      strikes_ = (steady && drifting) ? strikes_ + 1 : 0;
    }
    have_last_ = true;
    last_exponent_ = exponent;
    last_condition_ = condition;
    return strikes_ >= strikes_needed_;
  }

 private:
  int next_;
  int strikes_needed_;
  int strikes_ = 0;
  bool have_last_ = false;
  double last_exponent_ = 0.0;
  double last_condition_ = 0.0;
};

CMatrix inverse_pd(const CMatrix& m) { return mat_fn(m, MatFn::Inv, 0.0); }

// log det eta(X) - log det X; -inf when eta(X) is singular (det eta(X) = 0).
double log_capacity_objective(const CpMap& eta, const CMatrix& x) {
  const CMatrix ex = eta.apply(x);
  if (!is_pd(ex, 1e-15)) return -std::numeric_limits<double>::infinity();
  return log_det_pd(ex) - log_det_pd(x);
}

// C^{1/2} eta^*(eta(C)^{-1}) C^{1/2} - I: dimensionless FOC defect, traceless.
CMatrix capacity_gradient_at(const CpMap& eta, const CMatrix& c, const CMatrix& c_half) {
  const CMatrix t = eta.adjoint_apply(inverse_pd(eta.apply(c)));
  return hermitian_part(c_half * t * c_half) - identity(c.rows());
}

double foc_residual(const CpMap& eta, const CMatrix& c) {
  const CMatrix t = eta.adjoint_apply(inverse_pd(eta.apply(c)));
  return (t - inverse_pd(c)).norm();
}

CapacityResult finish_capacity(const CpMap& eta, const CMatrix& c, CapacityMethod method,
                               int iterations, bool attained) {
  CapacityResult out;
  const CMatrix normalized = normalize_det(c);
  out.value = std::exp(log_capacity_objective(eta, normalized));
  out.residual = is_pd(eta.apply(normalized), 1e-15) ? foc_residual(eta, normalized)
                                                      : std::numeric_limits<double>::infinity();
  out.iterations = iterations;
  if (attained) {
    out.method = method;
    out.minimizer = normalized;
  } else {
    out.method = CapacityMethod::NotAttained;
  }
  return out;
}

}  // namespace

std::string to_string(SinkhornStatus s) {
  switch (s) {
    case SinkhornStatus::Converged: return "Converged";
    case SinkhornStatus::Diverged: return "Diverged";
    case SinkhornStatus::Budget: return "Budget";
  }
  return "?";
}

std::string to_string(DivergenceReason r) {
  switch (r) {
    case DivergenceReason::None: return "None";
    case DivergenceReason::ConditionNumber: return "ConditionNumber";
    case DivergenceReason::Plateau: return "Plateau";
    case DivergenceReason::SublinearRate: return "SublinearRate";
  }
  return "?";
}

std::string to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::FixedPoint: return "FixedPoint";
    case CapacityMethod::GradientDescent: return "GradientDescent";
    case CapacityMethod::NotAttained: return "NotAttained";
  }
  return "?";
}

std::string to_string(ScaleStatus s) {
  switch (s) {
    case ScaleStatus::Scaled: return "Scaled";
    case ScaleStatus::NotScalable: return "NotScalable";
    case ScaleStatus::Budget: return "Budget";
  }
  return "?";
}

SinkhornResult sinkhorn(const CpMap& eta, const SinkhornConfig& cfg) {
  const Eigen::Index n = eta.dim();
  SinkhornResult out;
  out.c1 = identity(n);
  out.c2 = identity(n);
  std::vector<CMatrix> current = eta.kraus();
  RateMonitor monitor(cfg.rate_check_start, cfg.rate_strikes);

  const auto current_ds = [&] { return ds_distance(CpMap(current)); };
  out.ds_history.push_back(current_ds());

  for (int it = 0;; ++it) {
    out.iterations = it;
    const double ds = out.ds_history.back();
    if (ds <= cfg.tol) {
      out.status = SinkhornStatus::Converged;
      return out;
    }
    if (it >= cfg.max_iter) {
      out.status = SinkhornStatus::Budget;
      return out;
    }

    CMatrix row = CMatrix::Zero(n, n);
    for (const CMatrix& k : current) row += k * k.adjoint();
    const CMatrix left = mat_fn(row, MatFn::InvSqrt, 0.0);
    for (CMatrix& k : current) k = left * k;
    out.c1 = left * out.c1;

    CMatrix col = CMatrix::Zero(n, n);
    for (const CMatrix& k : current) col += k.adjoint() * k;
    const CMatrix right = mat_fn(col, MatFn::InvSqrt, 0.0);
    for (CMatrix& k : current) k = k * right;
    out.c2 = right * out.c2;

    // c1 -> s c1, c2 -> c2 / s leaves c1 K c2^* unchanged; keep the factors balanced.
    const double s = std::sqrt(out.c2.norm() / out.c1.norm());
    out.c1 *= s;
    out.c2 /= s;

    out.ds_history.push_back(current_ds());
    out.condition = std::max(condition_number(out.c1), condition_number(out.c2));

    if (out.condition > cfg.condition_limit) {
      out.iterations = it + 1;
      out.status = SinkhornStatus::Diverged;
      out.reason = DivergenceReason::ConditionNumber;
      return out;
    }
    const auto k = static_cast<int>(out.ds_history.size()) - 1;
    if (k >= cfg.plateau_window && out.ds_history.back() > cfg.tol) {
      const double before = out.ds_history[static_cast<std::size_t>(k - cfg.plateau_window)];
      if (out.ds_history.back() > (1.0 - cfg.plateau_rel) * before) {
        out.iterations = it + 1;
        out.status = SinkhornStatus::Diverged;
        out.reason = DivergenceReason::Plateau;
        return out;
      }
    }
    if (out.ds_history.back() > cfg.tol && monitor.sublinear(out.ds_history, out.condition)) {
      out.iterations = it + 1;
      out.status = SinkhornStatus::Diverged;
      out.reason = DivergenceReason::SublinearRate;
      return out;
    }
  }
}

TwoCycle two_cycle_from_sinkhorn(const CpMap& eta, const SinkhornResult& sr) {
  const Eigen::Index n = eta.dim();
  TwoCycle cycle;
  cycle.d = hermitian_part(sr.c2.adjoint() * sr.c2);
  cycle.e = hermitian_part(sr.c1.adjoint() * sr.c1);
  cycle.residual_d = (eta.apply(cycle.d) * cycle.e - identity(n)).norm();
  cycle.residual_e = (eta.apply(cycle.e) * cycle.d - identity(n)).norm();
  return cycle;
}

CapacityResult capacity_fixed_point(const CpMap& eta, const CapacityConfig& cfg,
                                    const std::optional<CMatrix>& start) {
  const Eigen::Index n = eta.dim();
  CMatrix c = normalize_det(start.value_or(identity(n)));
  std::vector<double> history;
  RateMonitor monitor(1000, 3);
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const CMatrix ec = eta.apply(c);
    if (!is_pd(ec, 1e-15)) return finish_capacity(eta, c, CapacityMethod::FixedPoint, it, false);
    const CMatrix t = eta.adjoint_apply(inverse_pd(ec));
    const CMatrix c_half = mat_fn(c, MatFn::Sqrt, 0.0);
    const double defect = (hermitian_part(c_half * t * c_half) - identity(n)).norm();
    history.push_back(defect);
    if (defect <= cfg.tol) return finish_capacity(eta, c, CapacityMethod::FixedPoint, it, true);
    const double cond = condition_number_pd(c);
    if (cond > cfg.condition_limit || monitor.sublinear(history, cond))
      return finish_capacity(eta, c, CapacityMethod::FixedPoint, it, false);
    if (!is_pd(t, 0.0)) return finish_capacity(eta, c, CapacityMethod::FixedPoint, it, false);
    c = normalize_det(inverse_pd(t));
  }
  return finish_capacity(eta, c, CapacityMethod::FixedPoint, cfg.max_iter, false);
}

CapacityResult capacity_gradient(const CpMap& eta, const CapacityConfig& cfg,
                                 const std::optional<CMatrix>& start) {
  const Eigen::Index n = eta.dim();
  CMatrix x = normalize_det(start.value_or(identity(n)));
  std::vector<double> history;
  RateMonitor monitor(1000, 3);
  double f = log_capacity_objective(eta, x);
  if (!std::isfinite(f)) return finish_capacity(eta, x, CapacityMethod::GradientDescent, 0, false);
  double step = 1.0;
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const CMatrix x_half = mat_fn(x, MatFn::Sqrt, 0.0);
    const CMatrix grad = capacity_gradient_at(eta, x, x_half);
    const double gnorm = grad.norm();
    history.push_back(gnorm);
    if (gnorm <= cfg.tol) return finish_capacity(eta, x, CapacityMethod::GradientDescent, it, true);
    const double cond = condition_number_pd(x);
    if (cond > cfg.condition_limit || monitor.sublinear(history, cond))
      return finish_capacity(eta, x, CapacityMethod::GradientDescent, it, false);

    // Armijo backtracking along the geodesic X^{1/2} exp(-a G) X^{1/2}.
    step = std::min(1.0, step * 2.0);
    bool accepted = false;
    while (step > 1e-16) {
      const CMatrix candidate = normalize_det(x_half * herm_exp(-step * grad) * x_half);
      const double fc = log_capacity_objective(eta, candidate);
      if (!std::isfinite(fc)) return finish_capacity(eta, candidate, CapacityMethod::GradientDescent, it, false);
      if (fc <= f - 1e-4 * step * gnorm * gnorm) {
        x = candidate;
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    // No decrease possible at this precision: the iterate is as good as it gets.
    if (!accepted) {
      const bool attained = gnorm <= std::sqrt(cfg.tol);
      return finish_capacity(eta, x, CapacityMethod::GradientDescent, it, attained);
    }
  }
  return finish_capacity(eta, x, CapacityMethod::GradientDescent, cfg.max_iter, false);
}

CapacityResult capacity(const CpMap& eta, const CapacityConfig& cfg) {
  CapacityResult fp = capacity_fixed_point(eta, cfg);
  CapacityResult gd = capacity_gradient(eta, cfg);
  const bool fp_ok = fp.method != CapacityMethod::NotAttained;
  const bool gd_ok = gd.method != CapacityMethod::NotAttained;
  if (fp_ok && gd_ok) fp.cross_check = std::abs(fp.value - gd.value) / fp.value;
  if (fp_ok) return fp;
  if (gd_ok) return gd;
  return fp.value <= gd.value ? fp : gd;
}

double scaling_residual(const CpMap& eta, const CMatrix& c) {
  return (eta.apply(c) * c - identity(eta.dim())).norm();
}

std::optional<CMatrix> geodesic_fixed_point(const CpMap& eta, const CMatrix& start,
                                            double residual_target, int max_iter) {
  CMatrix c = hermitian_part(start);
  double r = scaling_residual(eta, c);
  double t = 0.5;
  for (int it = 0; it < max_iter; ++it) {
    if (r <= residual_target) return c;
    const CMatrix ec = eta.apply(c);
    if (!is_pd(ec, 0.0)) return std::nullopt;
    const CMatrix target = inverse_pd(ec);
    t = std::min(0.5, 2.0 * t);
    bool accepted = false;
    while (t > 1e-12) {
      const CMatrix candidate = pd_geodesic(c, target, t);
      const double rc = scaling_residual(eta, candidate);
      if (rc < r) {
        c = candidate;
        r = rc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (r <= residual_target) return c;
  return std::nullopt;
}

ScalingCertificate make_certificate(const CpMap& eta, const CMatrix& c, double kernel_tol) {
  ScalingCertificate cert;
  cert.c = hermitian_part(c);
  cert.residual = scaling_residual(eta, cert.c);
  cert.kernel = neg_unit_eigenspace(symmetric_scaling(eta, cert.c), cert.c, kernel_tol);
  double foc = 0.0;
  for (const CMatrix& y : cert.kernel.basis) foc = std::max(foc, std::abs((y * cert.c).trace().real()));
  cert.foc_residual = foc;
  return cert;
}

SymmetricScaling symmetric_scale(const CpMap& eta, const ScaleConfig& cfg, ScaleMethod method,
                                 const std::optional<CMatrix>& start) {
  if (!eta.hermitian_kraus())
    throw PreconditionViolated("symmetric_scale: rewrite the map with Hermitian Kraus operators first");
  const Eigen::Index n = eta.dim();
  SymmetricScaling out;
  std::optional<CMatrix> c;

  if (method == ScaleMethod::SinkhornMidpoint) {
    out.sinkhorn = sinkhorn(eta, cfg.sinkhorn);
    if (out.sinkhorn.status == SinkhornStatus::Diverged) {
      out.status = ScaleStatus::NotScalable;
      return out;
    }
    if (out.sinkhorn.status == SinkhornStatus::Budget) {
      out.status = ScaleStatus::Budget;
      return out;
    }
    TwoCycle cycle = two_cycle_from_sinkhorn(eta, out.sinkhorn);
    const double cycle_tol = 10.0 * std::sqrt(cfg.sinkhorn.tol) *
                             std::max({1.0, condition_number_pd(cycle.d), condition_number_pd(cycle.e)});
    out.cycle = cycle;
    const CMatrix seed = (cycle.residual_d <= cycle_tol && cycle.residual_e <= cycle_tol)
                             ? geometric_mean(cycle.d, cycle.e)
                             : start.value_or(identity(n));
    c = geodesic_fixed_point(eta, seed, cfg.residual_target, cfg.max_iter);
  } else {
    c = geodesic_fixed_point(eta, start.value_or(identity(n)), cfg.residual_target, cfg.max_iter);
  }

  if (!c) {
    out.status = ScaleStatus::Budget;
    return out;
  }
  out.status = ScaleStatus::Scaled;
  out.certificate = make_certificate(eta, *c, cfg.kernel_tol);
  return out;
}

CMatrix solution_family(const ScalingCertificate& cert, std::span<const double> s) {
  if (s.size() != cert.kernel.basis.size())
    throw DimensionMismatch("solution_family: parameter count differs from kernel dimension");
  const Eigen::Index n = cert.c.rows();
  CMatrix y = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < s.size(); ++j) y += s[j] * cert.kernel.basis[j];
  const CMatrix c_half = mat_fn(cert.c, MatFn::Sqrt);
  return hermitian_part(c_half * herm_exp(y) * c_half);
}

TraceMinimization trace_minimizer(const CpMap& eta, const ScalingCertificate& start,
                                  const TraceMinConfig& cfg) {
  if (start.residual > cfg.residual_target)
    throw PreconditionViolated("trace_minimizer: starting point is not on the solution manifold");
  TraceMinimization out;
  CMatrix v = start.c;
  for (int it = 0;; ++it) {
    out.iterations = it;
    ScalingCertificate cert = make_certificate(eta, v, cfg.kernel_tol);
    if (cert.kernel.dim() == 0 || cert.foc_residual <= cfg.foc_target) {
      cert.trace_minimal = true;
      cert.jacobian = bifurcation_jacobian(cert);
      out.certificate = std::move(cert);
      out.status = TraceMinStatus::Converged;
      return out;
    }
    if (it >= cfg.max_iter) {
      out.certificate = std::move(cert);
      out.status = TraceMinStatus::Budget;
      return out;
    }

    const Eigen::Index n = v.rows();
    CMatrix z = CMatrix::Zero(n, n);
    double g2 = 0.0;
    for (const CMatrix& y : cert.kernel.basis) {
      const double g = (y * v).trace().real();
      z += g * y;
      g2 += g * g;
    }
    // Tr(V^{1/2} e^{-aZ} V^{1/2}) is convex in a; start from its Newton step.
    const double curvature = (v * z * z).trace().real();
    double step = curvature > 0.0 ? g2 / curvature : 1.0;
    const CMatrix v_half = mat_fn(v, MatFn::Sqrt, 0.0);
    const double f0 = v.trace().real();
    bool accepted = false;
    while (step >= cfg.min_step) {
      const CMatrix candidate = hermitian_part(v_half * herm_exp(-step * z) * v_half);
      if (candidate.trace().real() <= f0 - 1e-4 * step * g2) {
        v = candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.certificate = std::move(cert);
      out.status = TraceMinStatus::Stalled;
      return out;
    }
    if (scaling_residual(eta, v) > cfg.residual_target) {
      auto polished = geodesic_fixed_point(eta, v, cfg.residual_target, 10000);
      if (!polished) {
        out.certificate = make_certificate(eta, v, cfg.kernel_tol);
        out.status = TraceMinStatus::Stalled;
        return out;
      }
      v = *polished;
    }
  }
}

RMatrix bifurcation_jacobian(const ScalingCertificate& cert) {
  if (!cert.trace_minimal)
    throw PreconditionViolated("bifurcation_jacobian: certificate is not trace minimal");
  const auto d = static_cast<Eigen::Index>(cert.kernel.basis.size());
  RMatrix m(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      const CMatrix& yj = cert.kernel.basis[static_cast<std::size_t>(j)];
      const CMatrix& yk = cert.kernel.basis[static_cast<std::size_t>(k)];
      m(j, k) = 0.5 * ((yj * cert.c * yk).trace().real() + (yk * cert.c * yj).trace().real());
    }
  return m;
}

CMatrix linearization_apply(const CpMap& eta, const CMatrix& c, const CMatrix& k) {
  return k + c * eta.apply(k) * c;
}

CMatrix linearization_adjoint_apply(const CpMap& eta, const CMatrix& c, const CMatrix& l) {
  return l + eta.adjoint_apply(c * l * c);
}

}  // namespace semicircle
