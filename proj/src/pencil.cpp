#include "semicircle/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace semicircle {

namespace {

constexpr double kDsPrecondition = 1e-6;
constexpr double kClusterTol = 1e-7;
constexpr double kCommutantTol = 1e-7;
constexpr double kPolishDs = 1e-20;

CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

CMatrix orthonormal_columns(const CMatrix& m) {
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
}

// Left singular vectors of `m` with singular value above rel_tol * sigma_max,
// at most `max_cols` of them.
CMatrix range_basis(const CMatrix& m, double rel_tol, Eigen::Index max_cols) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && rank < max_cols && s(rank) > rel_tol * std::max(s(0), 1e-300)) ++rank;
  return svd.matrixU().leftCols(rank);
}

double witness_residual(const HermitianPencil& pencil, const CMatrix& right, const CMatrix& left) {
  const Eigen::Index n = pencil.dim();
  const CMatrix p_left = CMatrix::Identity(n, n) - left * left.adjoint();
  const CMatrix p_right = right * right.adjoint();
  double worst = 0.0;
  for (const CMatrix& a : pencil.coefficients()) worst = std::max(worst, spectral_norm(p_left * a * p_right));
  return worst;
}

std::optional<ShrunkWitness> search_dimension(const HermitianPencil& pencil, Eigen::Index k,
                                              std::mt19937_64& rng, double scale) {
  const Eigen::Index n = pencil.dim();
  const Eigen::Index ell = k - 1;
  CMatrix right = orthonormal_columns(random_gaussian(n, k, rng));
  CMatrix left(n, 0);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 300; ++it) {
    if (ell > 0) {
      CMatrix stacked(n, k * static_cast<Eigen::Index>(pencil.size()));
      for (std::size_t i = 0; i < pencil.size(); ++i)
        stacked.middleCols(static_cast<Eigen::Index>(i) * k, k) = pencil.coefficients()[i] * right;
      Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
      left = svd.matrixU().leftCols(ell);
    }
    const CMatrix p_left = CMatrix::Identity(n, n) - left * left.adjoint();
    CMatrix q = CMatrix::Zero(n, n);
    for (const CMatrix& a : pencil.coefficients()) q += a.adjoint() * p_left * a;
    const HermEig e = herm_eig(q);
    right = e.vectors.leftCols(k);
    const double objective = std::max(0.0, e.values.head(k).sum());
    if (std::sqrt(objective) <= 1e-12 * scale) break;
    if (objective > last * (1.0 - 1e-6)) break;
    last = objective;
  }
  const double residual = witness_residual(pencil, right, left);
  if (residual <= kWitnessTol * scale) return ShrunkWitness{right, left, residual};
  return std::nullopt;
}

// Null space of X -> [X, g] over all g in `generators` and their adjoints.
std::vector<CMatrix> commutant_basis(const std::vector<CMatrix>& generators, Eigen::Index n) {
  const Eigen::Index m = n * n;
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix gram = CMatrix::Zero(m, m);
  const auto add = [&](const CMatrix& g) {
    // vec(XG - GX) = (G^T (x) I - I (x) G) vec(X), column-major vec.
    CMatrix op = CMatrix::Zero(m, m);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        op.block(a * n, b * n, n, n) += g(b, a) * id;
        if (a == b) op.block(a * n, b * n, n, n) -= g;
      }
    gram += op.adjoint() * op;
  };
  double scale = 0.0;
  for (const CMatrix& g : generators) {
    add(g);
    add(g.adjoint());
    scale = std::max(scale, g.squaredNorm());
  }
  const HermEig e = herm_eig(gram);
  std::vector<CMatrix> basis;
  const double threshold = std::pow(kCommutantTol, 2) * std::max(scale, 1e-300) * 4.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (e.values(i) > threshold) break;
    basis.push_back(Eigen::Map<const CMatrix>(e.vectors.col(i).data(), n, n));
  }
  return basis;
}

std::vector<CMatrix> algebra_generators(const std::vector<CMatrix>& kraus) {
  std::vector<CMatrix> gens;
  for (const CMatrix& bj : kraus)
    for (const CMatrix& bi : kraus) gens.push_back(bj.adjoint() * bi);
  return gens;
}

void check_ds(const std::vector<CMatrix>& kraus) {
  const Eigen::Index n = kraus.front().rows();
  CMatrix row = CMatrix::Zero(n, n);
  CMatrix col = CMatrix::Zero(n, n);
  for (const CMatrix& b : kraus) {
    row += b * b.adjoint();
    col += b.adjoint() * b;
  }
  const CMatrix id = CMatrix::Identity(n, n);
  if ((row - id).norm() > kDsPrecondition || (col - id).norm() > kDsPrecondition) {
    std::ostringstream os;
    os << "block_diagonalize_ds: Kraus list is not doubly stochastic (row defect " << (row - id).norm()
       << ", column defect " << (col - id).norm() << ")";
    throw PreconditionViolated(os.str());
  }
}

struct Split {
  CMatrix left;
  CMatrix right;
  std::vector<int> blocks;
};

Split decompose(const std::vector<CMatrix>& kraus, std::mt19937_64& rng) {
  const Eigen::Index n = kraus.front().rows();
  const std::vector<CMatrix> comm = commutant_basis(algebra_generators(kraus), n);
  if (comm.size() <= 1) return {CMatrix::Identity(n, n), CMatrix::Identity(n, n), {static_cast<int>(n)}};

  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix x = CMatrix::Zero(n, n);
  for (const CMatrix& c : comm) x += Complex(normal(rng), normal(rng)) * c;
  x = hermitian_part(x);
  x /= std::max(spectral_norm(x), 1e-300);
  const HermEig e = herm_eig(x);

  // Clusters of (near) equal eigenvalues give the right-side invariant subspaces.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i)
    if (i == n || e.values(i) - e.values(i - 1) > kClusterTol) {
      clusters.emplace_back(begin, i - begin);
      begin = i;
    }
  if (clusters.size() == 1) return {CMatrix::Identity(n, n), CMatrix::Identity(n, n), {static_cast<int>(n)}};

  Split out{CMatrix::Zero(n, n), CMatrix::Zero(n, n), {}};
  Eigen::Index offset = 0;
  for (const auto& [start, size] : clusters) {
    const CMatrix r = e.vectors.middleCols(start, size);
    CMatrix stacked(n, size * static_cast<Eigen::Index>(kraus.size()));
    for (std::size_t i = 0; i < kraus.size(); ++i)
      stacked.middleCols(static_cast<Eigen::Index>(i) * size, size) = kraus[i] * r;
    const CMatrix l = range_basis(stacked, 1e-8, size);
    if (l.cols() != size)
      throw PreconditionViolated("block_diagonalize_ds: left image has lower dimension than its block");

    std::vector<CMatrix> sub;
    for (const CMatrix& b : kraus) sub.push_back(l.adjoint() * b * r);
    Split inner = decompose(sub, rng);
    out.left.middleCols(offset, size) = l * inner.left;
    out.right.middleCols(offset, size) = r * inner.right;
    out.blocks.insert(out.blocks.end(), inner.blocks.begin(), inner.blocks.end());
    offset += size;
  }
  return out;
}

double off_block_norm(const CMatrix& m, const std::vector<int>& blocks) {
  CMatrix masked = m;
  Eigen::Index offset = 0;
  for (int size : blocks) {
    masked.block(offset, offset, size, size).setZero();
    offset += size;
  }
  return masked.norm();
}

}  // namespace

HermitianPencil::HermitianPencil(std::vector<CMatrix> coefficients, double hermitian_tol) {
  if (coefficients.empty()) throw InvalidInput("HermitianPencil: no coefficients");
  n_ = coefficients.front().rows();
  if (n_ < 1) throw InvalidInput("HermitianPencil: empty coefficient matrices");
  bool any_nonzero = false;
  for (CMatrix& a : coefficients) {
    if (a.rows() != n_ || a.cols() != n_) throw InvalidInput("HermitianPencil: coefficients must be n x n");
    if (!all_finite(a)) throw InvalidInput("HermitianPencil: non-finite entries");
    if ((a - a.adjoint()).norm() > hermitian_tol * std::max(1.0, a.norm()))
      throw InvalidInput("HermitianPencil: coefficient is not Hermitian");
    a = hermitian_part(a);
    any_nonzero = any_nonzero || a.norm() >= kZeroKrausNorm;
  }
  if (!any_nonzero) throw InvalidInput("HermitianPencil: every coefficient is zero");
  coefficients_ = std::move(coefficients);
}

HermitianPencil HermitianPencil::congruent(const CMatrix& u) const {
  std::vector<CMatrix> out;
  for (const CMatrix& a : coefficients_) out.push_back(u * a * u.adjoint());
  return HermitianPencil(std::move(out), 1e-10);
}

CpMap covariance_map(const HermitianPencil& pencil) {
  return CpMap::with_hermitian_kraus(pencil.coefficients());
}

std::optional<ShrunkWitness> shrunk_subspace_search(const HermitianPencil& pencil, std::uint64_t seed,
                                                    int restarts) {
  double scale = 0.0;
  for (const CMatrix& a : pencil.coefficients()) scale = std::max(scale, spectral_norm(a));
  for (Eigen::Index k = 1; k <= pencil.dim(); ++k)
    for (int restart = 0; restart < std::max(1, restarts); ++restart) {
      std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(restart) ^
                          (static_cast<std::uint64_t>(k) << 32));
      if (auto witness = search_dimension(pencil, k, rng, scale)) return witness;
    }
  return std::nullopt;
}

int commutant_dimension(const std::vector<CMatrix>& generators) {
  if (generators.empty()) throw InvalidInput("commutant_dimension: no generators");
  return static_cast<int>(commutant_basis(generators, generators.front().rows()).size());
}

BlockDecomposition block_diagonalize_ds(const std::vector<CMatrix>& kraus, std::uint64_t seed) {
  if (kraus.empty()) throw InvalidInput("block_diagonalize_ds: empty Kraus list");
  check_ds(kraus);
  std::mt19937_64 rng(seed);
  Split split = decompose(kraus, rng);
  BlockDecomposition out{split.left, split.right, split.blocks, 0.0};
  for (const CMatrix& b : kraus)
    out.off_block_mass = std::max(out.off_block_mass, off_block_norm(out.u_left.adjoint() * b * out.u_right, out.blocks));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NotFull: return "NotFull";
    case Verdict::FullNotLRSemisimple: return "FullNotLRSemisimple";
    case Verdict::LRSemisimple: return "LRSemisimple";
    case Verdict::Unsplittable: return "Unsplittable";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

Classification classify(const HermitianPencil& pencil, const ClassifyConfig& cfg) {
  Classification out;
  out.witness = shrunk_subspace_search(pencil, cfg.seed, cfg.restarts);
  if (out.witness) {
    out.verdict = Verdict::NotFull;
    return out;
  }

  const CpMap eta = covariance_map(pencil);
  const SinkhornResult sr = sinkhorn(eta, cfg.sinkhorn);
  out.sinkhorn = {sr.status, sr.reason, sr.iterations, sr.final_ds(), sr.condition};
  if (sr.status == SinkhornStatus::Diverged) {
    out.verdict = Verdict::FullNotLRSemisimple;
    return out;
  }
  if (sr.status == SinkhornStatus::Budget) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }

  // Tighten the scaling before extracting exact block structure.
  CMatrix c1 = sr.c1;
  CMatrix c2 = sr.c2;
  SinkhornConfig polish = cfg.sinkhorn;
  polish.tol = std::min(cfg.sinkhorn.tol, kPolishDs);
  const CpMap scaled = scale(eta, c1, c2).materialize();
  const SinkhornResult refined = sinkhorn(scaled, polish);
  if (refined.status == SinkhornStatus::Converged) {
    c1 = refined.c1 * c1;
    c2 = refined.c2 * c2;
  }
  const std::vector<CMatrix> ds_kraus = scale(eta, c1, c2).materialize().kraus();
  const BlockDecomposition bd = block_diagonalize_ds(ds_kraus, cfg.seed);

  BlockStructure blocks;
  blocks.sizes = bd.blocks;
  blocks.left = bd.u_left.adjoint() * c1;
  blocks.right = c2.adjoint() * bd.u_right;
  for (const CMatrix& a : pencil.coefficients()) {
    const CMatrix lar = blocks.left * a * blocks.right;
    blocks.residual = std::max(blocks.residual, off_block_norm(lar, bd.blocks) / std::max(lar.norm(), 1e-300));
  }
  out.blocks = blocks;
  out.verdict = bd.blocks.size() == 1 ? Verdict::Unsplittable : Verdict::LRSemisimple;
  return out;
}

}  // namespace semicircle
