#include "semicircle/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "semicircle/scaling.hpp"

namespace semicircle {

namespace {

constexpr double kPi = std::numbers::pi;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  CMatrix gaussian(Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(normal(), normal()) / std::sqrt(2.0);
    return m;
  }

  CMatrix pd(Eigen::Index n) {
    const CMatrix g = gaussian(n);
    return g * g.adjoint() / static_cast<double>(n) + 0.1 * CMatrix::Identity(n, n);
  }

  // I + 0.3 G: comfortably invertible.
  CMatrix invertible(Eigen::Index n) { return CMatrix::Identity(n, n) + 0.3 * gaussian(n); }

  // Orthogonal projection onto a random k-dimensional subspace.
  CMatrix projection(Eigen::Index n, Eigen::Index k) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian(n));
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, k);
    return q * q.adjoint();
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

int numerical_rank(const CMatrix& h, double rel = 1e-9) {
  const RVector ev = herm_eig(h).values;
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  return static_cast<int>((ev.array().abs() > rel * top).count());
}

CheckResult bound_check(std::string name, double measured, double threshold, std::string note = {}) {
  return {std::move(name), measured <= threshold, false, measured, threshold, std::move(note)};
}

CheckResult skipped(std::string name, std::string note) { return {std::move(name), true, true, 0.0, 0.0, std::move(note)}; }

CMatrix inv_apply(const CpMap& eta, const CMatrix& x) { return eta.apply(x).inverse(); }

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const CheckResult& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<CertifiedCycle> certified_cycles(const CpMap& eta, const CMatrix& c, int count, std::uint64_t seed) {
  const Eigen::Index n = eta.dim();
  const CMatrix half = mat_fn(c, MatFn::Sqrt);
  const CpMap phi = symmetric_scaling(eta, c).materialize();
  const KernelBasis plus = hermitian_eigenspace(phi, 1.0, 1e-8);
  Sampler sampler(seed);
  std::vector<CertifiedCycle> out;
  for (int k = 0; k < count; ++k) {
    CMatrix z = CMatrix::Zero(n, n);
    for (const CMatrix& y : plus.basis) z += sampler.uniform(-0.5, 0.5) * y;
    const double t = std::exp(sampler.uniform(-1.0, 1.0));
    CertifiedCycle cyc;
    cyc.first = hermitian_part(t * half * herm_exp(z) * half);
    cyc.second = hermitian_part(inv_apply(eta, cyc.first));
    cyc.residual = (inv_apply(eta, cyc.second) - cyc.first).norm() / cyc.first.norm();
    out.push_back(std::move(cyc));
  }
  return out;
}

double reflection_defect(const CpMap& eta, const CertifiedCycle& cycle) {
  const double scale = std::max(cycle.first.norm(), cycle.second.norm());
  double worst = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const CMatrix lhs = inv_apply(eta, pd_geodesic(cycle.first, cycle.second, t));
    const CMatrix rhs = pd_geodesic(cycle.first, cycle.second, 1.0 - t);
    worst = std::max(worst, (lhs - rhs).norm() / scale);
  }
  return worst;
}

double interpolation_defect(const CpMap& eta, const CertifiedCycle& cycle) {
  const CMatrix half = mat_fn(cycle.first, MatFn::Sqrt);
  const CMatrix inv_half = mat_fn(cycle.first, MatFn::InvSqrt);
  const CpMap herm = eta.hermitian_kraus() ? eta : hermitian_kraus(eta);
  std::vector<CMatrix> conj;
  for (const CMatrix& b : herm.kraus()) conj.push_back(half * b * half);
  const CpMap tilde = CpMap::with_hermitian_kraus(std::move(conj));
  const CMatrix p = hermitian_part(inv_half * cycle.second * inv_half);
  double worst = 0.0;
  for (double t : {0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0})
    worst = std::max(worst, (tilde.apply(pd_pow(p, t)) - pd_pow(p, t - 1.0)).norm());
  return worst;
}

VerifyReport verify_pencil(const HermitianPencil& pencil, const VerifyConfig& cfg) {
  VerifyReport report;
  auto& checks = report.checks;
  const Eigen::Index n = pencil.dim();
  const CpMap eta = covariance_map(pencil);
  Sampler sampler(cfg.seed);
  const int trials = std::max(1, cfg.trials);

  // Covariance map.
  checks.push_back(bound_check("self_adjoint", self_adjointness_defect(eta), 1e-10));
  {
    double worst_neg = 0.0;
    double worst_dual = 0.0;
    for (int k = 0; k < trials; ++k) {
      const CMatrix x = sampler.pd(n);
      const CMatrix ex = eta.apply(x);
      worst_neg = std::max(worst_neg, -min_eigenvalue(ex) / std::max(spectral_norm(ex), 1e-300));
      const CMatrix a = sampler.gaussian(n);
      const CMatrix b = sampler.gaussian(n);
      const Complex lhs = trace(eta.apply(a) * b);
      const Complex rhs = trace(a * eta.adjoint_apply(b));
      worst_dual = std::max(worst_dual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    checks.push_back(bound_check("covariance_positivity", worst_neg, 1e-12));
    checks.push_back(bound_check("adjoint_duality", worst_dual, 1e-10));
  }

  // Cone geometry.
  {
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
      const CMatrix a = sampler.pd(n);
      const CMatrix b = sampler.pd(n);
      const CMatrix s = sampler.invertible(n);
      const double d = pd_distance(a, b);
      worst = std::max(worst, std::abs(pd_distance(s * a * s.adjoint(), s * b * s.adjoint()) - d));
      worst = std::max(worst, std::abs(pd_distance(a.inverse(), b.inverse()) - d));
    }
    checks.push_back(bound_check("pd_distance_invariance", worst, 1e-8));
  }

  // Classification and the verdict-dependent expectations.
  const Classification cl = classify(pencil, cfg.classify);
  report.verdict = to_string(cl.verdict);
  checks.push_back({"classification_decided", cl.verdict != Verdict::Inconclusive, false, 0.0, 0.0, report.verdict});

  ScaleConfig scfg;
  scfg.sinkhorn = cfg.classify.sinkhorn;
  const SymmetricScaling sc = symmetric_scale(eta, scfg);
  const bool expect_scaled = cl.verdict == Verdict::LRSemisimple || cl.verdict == Verdict::Unsplittable;
  {
    const bool scaled = sc.status == ScaleStatus::Scaled;
    CheckResult c{"scaling_matches_verdict", scaled == expect_scaled, false, 0.0, 0.0,
                  "verdict " + report.verdict + ", scaling " + to_string(sc.status)};
    if (cl.verdict == Verdict::Inconclusive) c = skipped("scaling_matches_verdict", "verdict inconclusive");
    checks.push_back(c);
  }

  DensityPoint at_zero;
  bool zero_ok = true;
  try {
    at_zero = density_at(eta, 0.0, cfg.density);
  } catch (const Error& e) {
    zero_ok = false;
    checks.push_back({"density_at_zero", false, false, 0.0, 0.0, e.what()});
  }
  if (zero_ok) {
    const bool regular = at_zero.status == PointStatus::Ok;
    CheckResult c{"zero_status_matches_verdict", regular == expect_scaled, false, at_zero.value, 0.0,
                  "f(0) status " + to_string(at_zero.status)};
    if (cl.verdict == Verdict::Inconclusive) c = skipped("zero_status_matches_verdict", "verdict inconclusive");
    checks.push_back(c);
  }

  // Capacity and its scaling law.
  const CapacityResult cap = capacity(eta);
  if (cap.method != CapacityMethod::NotAttained) {
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
      const CMatrix c1 = sampler.invertible(n);
      const CMatrix c2 = sampler.invertible(n);
      const double factor = std::norm(c1.determinant()) * std::norm(c2.determinant());
      const CapacityResult scaled_cap = capacity(scale(eta, c1, c2).materialize());
      worst = std::max(worst, std::abs(scaled_cap.value - factor * cap.value) / (factor * cap.value));
    }
    checks.push_back(bound_check("capacity_scaling_law", worst, 1e-6));
  } else {
    checks.push_back(skipped("capacity_scaling_law", "capacity not attained"));
  }

  if (sc.certificate) {
    const ScalingCertificate& cert = *sc.certificate;
    checks.push_back(bound_check("scaling_residual", cert.residual, 1e-9));

    const CpMap phi = symmetric_scaling(eta, cert.c).materialize();
    double ks = 0.0;
    for (int k = 0; k < trials; ++k) {
      const CMatrix a = sampler.gaussian(n);
      const CMatrix pa = phi.apply(a);
      const CMatrix gap = phi.apply(a.adjoint() * a) - pa.adjoint() * pa;
      ks = std::max(ks, -min_eigenvalue(hermitian_part(gap)) / std::max(1.0, a.squaredNorm()));
    }
    checks.push_back(bound_check("kadison_schwarz", ks, 1e-8));

    double md = 0.0;
    std::vector<CMatrix> unit_vectors = cert.kernel.basis;
    for (const CMatrix& y : hermitian_eigenspace(phi, 1.0, 1e-8).basis) unit_vectors.push_back(y);
    for (const CMatrix& y : unit_vectors) {
      const CMatrix py = phi.apply(y);
      md = std::max(md, (phi.apply(y * y) - py * py).norm());
    }
    checks.push_back(bound_check("multiplicative_domain", md, 1e-8));

    double kernel_trace = 0.0;
    for (const CMatrix& y : cert.kernel.basis) kernel_trace = std::max(kernel_trace, std::abs(trace(y)));
    checks.push_back(bound_check("kernel_traceless", kernel_trace, 1e-8));

    // Certified 2-cycles: reflection about the midpoint and interpolation.
    double refl = 0.0;
    double interp = 0.0;
    double cyc_res = 0.0;
    for (const CertifiedCycle& cyc : certified_cycles(eta, cert.c, std::min(trials, 10), cfg.seed + 1)) {
      cyc_res = std::max(cyc_res, cyc.residual);
      refl = std::max(refl, reflection_defect(eta, cyc));
      interp = std::max(interp, interpolation_defect(eta, cyc));
    }
    checks.push_back(bound_check("two_cycle_residual", cyc_res, 1e-9));
    checks.push_back(bound_check("geodesic_reflection", refl, 1e-8));
    checks.push_back(bound_check("interpolation", interp, 1e-8));

    try {
      const TraceMinimization tm = trace_minimizer(eta, cert);
      checks.push_back(bound_check("trace_minimizer_foc", tm.certificate.foc_residual, 1e-7));
      if (tm.certificate.kernel.dim() > 0) {
        const RMatrix jac = bifurcation_jacobian(tm.certificate);
        const double lo = Eigen::SelfAdjointEigenSolver<RMatrix>(jac).eigenvalues().minCoeff();
        checks.push_back({"bifurcation_jacobian_pd", lo > 0.0, false, lo, 0.0, "smallest eigenvalue"});
      } else {
        checks.push_back(skipped("bifurcation_jacobian_pd", "kernel is trivial"));
      }
      const double f0 = f0_from_certificate(tm.certificate);
      if (zero_ok && at_zero.status == PointStatus::Ok)
        checks.push_back(bound_check("f0_routes_agree", std::abs(f0 - at_zero.value), 1e-5));
      const double lower = std::pow(cap.value, -1.0 / (2.0 * static_cast<double>(n))) / kPi;
      checks.push_back(bound_check("capacity_lower_bound", lower - f0, 1e-9, "(1/pi) Cap^(-1/2n) - f(0)"));
    } catch (const Error& e) {
      checks.push_back({"trace_minimizer_foc", false, false, 0.0, 1e-7, e.what()});
    }
  } else {
    checks.push_back(skipped("scaling_residual", "no scaling certificate"));
  }

  // DS splittings: the orthocomplement pair is invariant as well.
  if (cl.verdict == Verdict::LRSemisimple) {
    try {
      SinkhornConfig polish = cfg.classify.sinkhorn;
      polish.tol = 1e-20;
      const SinkhornResult sr = sinkhorn(eta, polish);
      const std::vector<CMatrix> ds = scale(eta, sr.c1, sr.c2).materialize().kraus();
      const BlockDecomposition bd = block_diagonalize_ds(ds, cfg.seed);
      double worst = 0.0;
      Eigen::Index offset = 0;
      for (int b : bd.blocks) {
        const CMatrix r = bd.u_right.middleCols(offset, b);
        const CMatrix l = bd.u_left.middleCols(offset, b);
        const CMatrix pr_perp = CMatrix::Identity(n, n) - r * r.adjoint();
        const CMatrix pl_perp = CMatrix::Identity(n, n) - l * l.adjoint();
        for (const CMatrix& k : ds) {
          worst = std::max(worst, ((CMatrix::Identity(n, n) - l * l.adjoint()) * k * r).norm());
          worst = std::max(worst, ((CMatrix::Identity(n, n) - pl_perp) * k * pr_perp).norm());
        }
        offset += b;
      }
      checks.push_back(bound_check("splitting_orthocomplement", worst, 1e-6));
    } catch (const Error& e) {
      checks.push_back({"splitting_orthocomplement", false, false, 0.0, 1e-6, e.what()});
    }
  } else {
    checks.push_back(skipped("splitting_orthocomplement", "no DS splitting"));
  }

  // Unsplittable pencils have indecomposable covariance maps.
  if (cl.verdict == Verdict::Unsplittable && n > 1) {
    int failures = 0;
    for (int k = 0; k < trials; ++k) {
      const auto rank = static_cast<Eigen::Index>(1 + k % (n - 1));
      if (numerical_rank(eta.apply(sampler.projection(n, rank))) <= rank) ++failures;
    }
    checks.push_back(bound_check("indecomposable_rank_increase", failures, 0.0, "trials without rank increase"));
  } else {
    checks.push_back(skipped("indecomposable_rank_increase", "pencil not unsplittable"));
  }

  // HFS solutions in the right half-plane.
  {
    double res = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    double sym = 0.0;
    double l2 = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < trials; ++k) {
      const Complex u(std::exp(sampler.uniform(std::log(0.02), std::log(2.0))), sampler.uniform(-3.0, 3.0));
      try {
        const CMatrix w = cauchy_transform(eta, Complex(-u.imag(), u.real()), cfg.density.hfs) * Complex(0.0, 1.0);
        const CMatrix wc = cauchy_transform(eta, Complex(u.imag(), u.real()), cfg.density.hfs) * Complex(0.0, 1.0);
        const CMatrix defect = eta.apply(w) * w + u * w - CMatrix::Identity(n, n);
        res = std::max(res, defect.norm());
        margin = std::min(margin, min_eigenvalue(hermitian_part(w)));
        sym = std::max(sym, (wc - w.adjoint()).norm());
        const Complex z(-u.imag(), u.real());
        const CMatrix g = -Complex(0.0, 1.0) * w;
        l2 = std::max(l2, normalized_hs_norm(g) - 2.0 / std::abs(z));
      } catch (const Error&) {
        res = std::numeric_limits<double>::infinity();
      }
    }
    checks.push_back(bound_check("hfs_residual", res, 1e-10));
    checks.push_back({"hfs_accretive", margin > 0.0, false, margin, 0.0, "smallest eigenvalue of Re W"});
    checks.push_back(bound_check("hfs_conjugate_symmetry", sym, 1e-9));
    checks.push_back(bound_check("cauchy_l2_bound", l2, 1e-8, "||G||_2 - 2/|z|"));
  }

  // Density bound away from 0.
  {
    double worst = -std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (double x : {-2.5, -1.5, -0.7, -0.2, 0.1, 0.4, 1.1, 1.9, 2.7}) {
      try {
        const DensityPoint p = density_at(eta, x, cfg.density);
        if (p.status != PointStatus::Ok) continue;
        worst = std::max(worst, p.value - 2.0 / (kPi * std::abs(x)));
        ++evaluated;
      } catch (const Error&) {
      }
    }
    CheckResult c = bound_check("density_bound", worst, 1e-6, "f(x) - 2/(pi|x|)");
    if (evaluated == 0) {
      c.passed = false;
      c.note = "no regular grid points";
    }
    checks.push_back(c);
  }
  return report;
}

io::Json to_json(const VerifyReport& report) {
  io::Json j;
  j["verdict"] = report.verdict;
  io::Json list = io::Json::array();
  for (const CheckResult& c : report.checks) {
    io::Json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["skipped"] = c.skipped;
    e["measured"] = std::isfinite(c.measured) ? io::Json(c.measured) : io::Json(nullptr);
    e["threshold"] = c.threshold;
    if (!c.note.empty()) e["note"] = c.note;
    list.push_back(std::move(e));
  }
  j["checks"] = std::move(list);
  j["all_passed"] = report.all_passed();
  return j;
}

}  // namespace semicircle
