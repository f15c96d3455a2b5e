#include "semicircle/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace semicircle {

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix hfs_defect(const CpMap& eta, Complex u, const CMatrix& w) {
  const Eigen::Index n = w.rows();
  return eta.apply(w) * w + u * w - CMatrix::Identity(n, n);
}

double accretivity(const CMatrix& w) { return herm_eig(hermitian_part(w)).values(0); }

// Jacobian of W -> eta(W) W + u W on column-major vec(W).
CMatrix hfs_jacobian(const CpMap& eta, Complex u, const CMatrix& w) {
  const Eigen::Index n = w.rows();
  const CMatrix ew = eta.apply(w);
  CMatrix jac(n * n, n * n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) {
      CMatrix h = CMatrix::Zero(n, n);
      h(a, b) = 1.0;
      const CMatrix image = eta.apply(h) * w + ew * h + u * h;
      jac.col(b * n + a) = Eigen::Map<const CVector>(image.data(), n * n);
    }
  return jac;
}

// Value at eps = 0 of the polynomial through (eps[i], v[i]) (Neville).
double extrapolate_to_zero(std::span<const double> eps, std::span<const double> v) {
  std::vector<double> p(v.begin(), v.end());
  const std::size_t m = p.size();
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      p[i] = (eps[i + level] * p[i] - eps[i] * p[i + 1]) / (eps[i + level] - eps[i]);
  return p[0];
}

std::vector<double> continuation_prefix(double first_eps) {
  std::vector<double> prefix;
  for (double e : {1.0, 0.3, 0.1, 0.03})
    if (e > first_eps * 1.5) prefix.push_back(e);
  return prefix;
}

}  // namespace

namespace {

// Solve at `to` warm-started from the solution at `from`; on failure, split
// the step at the geometric midpoint of Re u.
HfsState solve_refined(const CpMap& eta, Complex from, Complex to, const CMatrix& w_from, const HfsConfig& cfg,
                       int depth) {
  try {
    return hfs_solve(eta, to, w_from, cfg);
  } catch (const ConvergenceFailure&) {
    if (depth >= 12) throw;
  }
  const Complex mid(std::sqrt(from.real() * to.real()), 0.5 * (from.imag() + to.imag()));
  const HfsState half = solve_refined(eta, from, mid, w_from, cfg, depth + 1);
  HfsState out = solve_refined(eta, mid, to, half.w, cfg, depth + 1);
  out.iterations += half.iterations;
  return out;
}

}  // namespace

HfsState hfs_solve(const CpMap& eta, Complex u, const std::optional<CMatrix>& w_init, const HfsConfig& cfg) {
  if (!(u.real() > 0.0)) throw InvalidInput("hfs_solve: requires Re u > 0");
  const Eigen::Index n = eta.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix w = w_init.value_or(id / (1.0 + std::abs(u)));
  if (w.rows() != n || w.cols() != n) throw DimensionMismatch("hfs_solve: initial guess has wrong size");
  double residual = hfs_defect(eta, u, w).norm();
  HfsState state{u, w, residual, 0.0, 0};

  // Damped fixed point until the residual is moderate or progress slows. Its
  // contraction degrades like 1 - O(Re u), so it only gets a short budget.
  double theta = 1.0;
  int it = 0;
  const int fp_budget = std::min(cfg.max_iter, 50);
  for (; it < fp_budget && residual > std::max(cfg.tol, 1e-3); ++it) {
    const CMatrix target = (eta.apply(w) + u * id).inverse();
    const CMatrix candidate = (1.0 - theta) * w + theta * target;
    const double rc = hfs_defect(eta, u, candidate).norm();
    if (rc < residual && accretivity(candidate) > 0.0) {
      const bool slow = rc > 0.9 * residual;
      w = candidate;
      residual = rc;
      theta = std::min(1.0, 2.0 * theta);
      if (slow) break;
    } else {
      theta *= 0.5;
      if (theta < 1e-6) break;
    }
  }

  // Newton with backtracking, keeping W accretive.
  int short_steps = 0;
  for (; it < cfg.max_iter && residual > cfg.tol; ++it) {
    const CMatrix f = hfs_defect(eta, u, w);
    const CVector rhs = -Eigen::Map<const CVector>(f.data(), n * n);
    const CVector step_vec = hfs_jacobian(eta, u, w).partialPivLu().solve(rhs);
    const CMatrix step = Eigen::Map<const CMatrix>(step_vec.data(), n, n);
    double s = 1.0;
    bool accepted = false;
    if (short_steps >= 8) break;
    while (s > 1e-10) {
      const CMatrix candidate = w + s * step;
      const double rc = hfs_defect(eta, u, candidate).norm();
      if (std::isfinite(rc) && rc < residual && accretivity(candidate) > 0.0) {
        w = candidate;
        residual = rc;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    // Persistent heavy damping means a curved valley; let the caller refine
    // the continuation instead of crawling.
    short_steps = s < 0.1 ? short_steps + 1 : 0;
    if (!accepted) break;
  }

  state.w = w;
  state.residual = residual;
  state.iterations = it;
  state.accretivity_margin = accretivity(w);
  if (!(residual <= cfg.tol) || !(state.accretivity_margin > 0.0)) {
    std::ostringstream os;
    os << "hfs_solve: no strictly accretive solution within budget at u = " << u.real() << (u.imag() < 0 ? "" : "+")
       << u.imag() << "i (residual " << residual << ", margin " << state.accretivity_margin << ")";
    throw ConvergenceFailure(os.str(), residual);
  }
  return state;
}

std::vector<HfsState> hfs_continuation(const CpMap& eta, std::span<const Complex> path, const HfsConfig& cfg) {
  std::vector<HfsState> states;
  states.reserve(path.size());
  std::optional<CMatrix> warm;
  std::optional<Complex> prev;
  for (std::size_t i = 0; i < path.size(); ++i) {
    try {
      states.push_back(prev ? solve_refined(eta, *prev, path[i], *warm, cfg, 0) : hfs_solve(eta, path[i], warm, cfg));
    } catch (const ConvergenceFailure& e) {
      std::ostringstream os;
      os << "hfs_continuation: failure at path index " << i << ": " << e.what();
      throw ConvergenceFailure(os.str(), e.last_residual());
    }
    warm = states.back().w;
    prev = path[i];
  }
  return states;
}

CMatrix cauchy_transform(const CpMap& eta, Complex z, const HfsConfig& cfg) {
  if (!(z.imag() > 0.0)) throw InvalidInput("cauchy_transform: requires Im z > 0");
  const Complex i(0.0, 1.0);
  const Complex u = -i * z;
  // Walk in from Re u >= 1 so the solve stays on the accretive branch.
  std::vector<Complex> path;
  for (double e : continuation_prefix(u.real())) path.emplace_back(e, u.imag());
  path.push_back(u);
  const auto states = hfs_continuation(eta, path, cfg);
  return -i * states.back().w;
}

std::vector<double> default_eps_path() { return {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6}; }

void BoundaryLimitConfig::validate() const {
  if (!(aperture > 0.0) || !(radius > 0.0)) throw InvalidInput("BoundaryLimitConfig: aperture and radius must be > 0");
  if (eps_path.empty()) throw InvalidInput("BoundaryLimitConfig: empty eps path");
  for (std::size_t i = 0; i < eps_path.size(); ++i) {
    if (!(eps_path[i] >= 1e-8) || eps_path[i] > radius)
      throw InvalidInput("BoundaryLimitConfig: eps values must lie in [1e-8, radius]");
    if (i > 0 && !(eps_path[i] < eps_path[i - 1]))
      throw InvalidInput("BoundaryLimitConfig: eps path must be strictly decreasing");
  }
  if (extrapolation_order < 0 || static_cast<std::size_t>(extrapolation_order) >= eps_path.size())
    throw InvalidInput("BoundaryLimitConfig: extrapolation order needs order + 1 eps values");
}

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Ok: return "ok";
    case PointStatus::Clamped: return "clamped";
    case PointStatus::Singular: return "singular";
    case PointStatus::Failed: return "failed";
  }
  return "?";
}

DensityPoint density_at(const CpMap& eta, double x, const BoundaryLimitConfig& cfg) {
  cfg.validate();
  std::vector<Complex> path;
  const std::vector<double> prefix = continuation_prefix(cfg.eps_path.front());
  for (double e : prefix) path.emplace_back(e, -x);
  for (double e : cfg.eps_path) path.emplace_back(e, -x);
  const auto states = hfs_continuation(eta, path, cfg.hfs);

  DensityPoint out;
  for (std::size_t i = prefix.size(); i < states.size(); ++i)
    out.trace_path.push_back(ntrace(states[i].w).real());

  const std::size_t m = out.trace_path.size();
  const auto k = static_cast<std::size_t>(cfg.extrapolation_order) + 1;
  const std::span<const double> eps_tail(cfg.eps_path.data() + (m - k), k);
  const std::span<const double> val_tail(out.trace_path.data() + (m - k), k);
  double value = extrapolate_to_zero(eps_tail, val_tail) / kPi;

  // Slopes along the last three eps values; a regular boundary value has
  // slopes converging to the derivative, a singular one has growing slopes.
  if (m >= 3) {
    const auto slope = [&](std::size_t i) {
      return (out.trace_path[i + 1] - out.trace_path[i]) / (cfg.eps_path[i] - cfg.eps_path[i + 1]);
    };
    const double s_prev = slope(m - 3);
    const double s_last = slope(m - 2);
    const double floor = 1e-6 * std::max(1.0, std::abs(out.trace_path.back()));
    if (std::abs(s_last) > 2.0 * std::abs(s_prev) + floor / cfg.eps_path[m - 2]) {
      out.status = PointStatus::Singular;
      value = out.trace_path.back() / kPi;
    }
  }
  if (value < 0.0) {
    value = 0.0;
    if (out.status == PointStatus::Ok) out.status = PointStatus::Clamped;
  }
  out.value = value;
  return out;
}

DensityTable density_grid(const CpMap& eta, std::span<const double> xs, const BoundaryLimitConfig& cfg,
                          unsigned threads) {
  cfg.validate();
  DensityTable table;
  table.xs.assign(xs.begin(), xs.end());
  table.fs.assign(xs.size(), 0.0);
  table.status.assign(xs.size(), PointStatus::Ok);
  table.eps_path = cfg.eps_path;
  table.extrapolation_order = cfg.extrapolation_order;
  if (xs.empty()) return table;

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < xs.size(); i = next++) {
      try {
        const DensityPoint p = density_at(eta, xs[i], cfg);
        table.fs[i] = p.value;
        table.status[i] = p.status;
      } catch (const Error&) {
        table.fs[i] = 0.0;
        table.status[i] = PointStatus::Failed;
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(xs.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return table;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw InvalidInput("linspace: need at least two points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return xs;
}

double f0_from_certificate(const ScalingCertificate& cert) {
  if (!cert.trace_minimal) throw PreconditionViolated("f0_from_certificate: certificate is not trace minimal");
  return ntrace(cert.c).real() / kPi;
}

namespace {

// Drops singular and failed points; the integrals bridge them linearly.
DensityTable regular_points(const DensityTable& table) {
  DensityTable out;
  out.eps_path = table.eps_path;
  out.extrapolation_order = table.extrapolation_order;
  for (std::size_t i = 0; i < table.xs.size(); ++i) {
    const PointStatus s = i < table.status.size() ? table.status[i] : PointStatus::Ok;
    if (s == PointStatus::Singular || s == PointStatus::Failed) continue;
    out.xs.push_back(table.xs[i]);
    out.fs.push_back(table.fs[i]);
    out.status.push_back(s);
  }
  return out;
}

}  // namespace

double table_mass(const DensityTable& full) {
  const DensityTable table = regular_points(full);
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < table.xs.size(); ++i)
    mass += 0.5 * (table.fs[i] + table.fs[i + 1]) * (table.xs[i + 1] - table.xs[i]);
  return mass;
}

namespace {

// Antiderivatives of log|x| and x log|x| (both continuous through 0).
double int_log(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)) - x; }
double int_xlog(double x) { return x == 0.0 ? 0.0 : 0.5 * x * x * std::log(std::abs(x)) - 0.25 * x * x; }

// Integral of log|x| times the piecewise-linear interpolant, on every
// `stride`-th node.
double log_moment(const DensityTable& table, std::size_t stride) {
  double acc = 0.0;
  std::size_t i = 0;
  while (i + stride < table.xs.size()) {
    const std::size_t j = i + stride;
    const double a = table.xs[i];
    const double b = table.xs[j];
    const double slope = (table.fs[j] - table.fs[i]) / (b - a);
    const double intercept = table.fs[i] - slope * a;
    acc += intercept * (int_log(b) - int_log(a)) + slope * (int_xlog(b) - int_xlog(a));
    i = j;
  }
  return acc;
}

}  // namespace

FkDeterminant fk_determinant(const DensityTable& full) {
  const DensityTable table = regular_points(full);
  if (table.xs.size() < 3 || table.xs.size() != table.fs.size())
    throw InvalidInput("fk_determinant: table too small or inconsistent");
  for (std::size_t i = 1; i < table.xs.size(); ++i)
    if (!(table.xs[i] > table.xs[i - 1])) throw InvalidInput("fk_determinant: xs must be strictly increasing");
  FkDeterminant out;
  out.mass = table_mass(table);
  if (std::abs(out.mass - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "fk_determinant: table does not cover the support (mass " << out.mass << ")";
    throw InvalidInput(os.str());
  }
  out.log_value = log_moment(table, 1);
  if (table.xs.size() % 2 == 1) out.error_estimate = std::abs(out.log_value - log_moment(table, 2)) / 3.0;
  out.value = std::exp(out.log_value);
  return out;
}

CuspFit cusp_exponent_fit(const DensityTable& table, double x_lo, double x_hi) {
  if (!(x_lo > 0.0 && x_hi > x_lo)) throw InvalidInput("cusp_exponent_fit: need 0 < x_lo < x_hi");
  if (!table.eps_path.empty()) {
    const double max_eps = *std::max_element(table.eps_path.begin(), table.eps_path.end());
    if (x_lo < 10.0 * max_eps)
      throw PreconditionViolated("cusp_exponent_fit: window reaches into the eps floor (x_lo < 10 max eps)");
  }
  struct Side {
    std::vector<double> lx, lf;
  } pos, neg;
  for (std::size_t i = 0; i < table.xs.size(); ++i) {
    const double ax = std::abs(table.xs[i]);
    if (ax < x_lo || ax > x_hi || !(table.fs[i] > 0.0)) continue;
    Side& side = table.xs[i] > 0.0 ? pos : neg;
    side.lx.push_back(std::log(ax));
    side.lf.push_back(std::log(table.fs[i]));
  }
  if (pos.lx.size() + neg.lx.size() < 5) throw InvalidInput("cusp_exponent_fit: fewer than 5 points in window");

  const auto fit = [](const Side& s) {
    const auto m = static_cast<double>(s.lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < s.lx.size(); ++i) {
      mx += s.lx[i];
      my += s.lf[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < s.lx.size(); ++i) {
      sxx += (s.lx[i] - mx) * (s.lx[i] - mx);
      sxy += (s.lx[i] - mx) * (s.lf[i] - my);
      syy += (s.lf[i] - my) * (s.lf[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return CuspFit{slope, r2};
  };

  std::vector<CuspFit> fits;
  if (pos.lx.size() >= 2) fits.push_back(fit(pos));
  if (neg.lx.size() >= 2) fits.push_back(fit(neg));
  CuspFit out;
  for (const CuspFit& f : fits) {
    out.exponent += f.exponent / static_cast<double>(fits.size());
    out.r2 += f.r2 / static_cast<double>(fits.size());
  }
  return out;
}

SupportEdges support_edges(const CpMap& eta, const DensityTable& table, const BoundaryLimitConfig& cfg,
                           double threshold, double x_tol) {
  SupportEdges out;
  std::size_t first_in = table.xs.size();
  std::size_t last_in = 0;
  for (std::size_t i = 0; i < table.xs.size(); ++i)
    if (table.fs[i] > threshold) {
      first_in = std::min(first_in, i);
      last_in = i;
    }
  if (first_in == table.xs.size()) return out;

  const auto inside = [&](double x) { return density_at(eta, x, cfg).value > threshold; };
  const auto bisect = [&](double in, double outside) {
    while (std::abs(outside - in) > x_tol) {
      const double mid = 0.5 * (in + outside);
      (inside(mid) ? in : outside) = mid;
    }
    return 0.5 * (in + outside);
  };
  out.lower = first_in > 0 ? bisect(table.xs[first_in], table.xs[first_in - 1]) : table.xs.front();
  out.upper = last_in + 1 < table.xs.size() ? bisect(table.xs[last_in], table.xs[last_in + 1]) : table.xs.back();
  out.found = first_in > 0 && last_in + 1 < table.xs.size();
  return out;
}

}  // namespace semicircle
