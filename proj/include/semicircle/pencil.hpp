#pragma once

// Hermitian matrix pencils A = sum_i A_i x_i and their classification in the
// hierarchy not full / full / LR-semisimple / unsplittable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semicircle/cpmap.hpp"
#include "semicircle/scaling.hpp"

namespace semicircle {

class HermitianPencil {
 public:
  HermitianPencil() = default;
  /// Each coefficient must be square, of common size, and Hermitian within
  /// `hermitian_tol` (relative); stored symmetrized. At least one nonzero.
  explicit HermitianPencil(std::vector<CMatrix> coefficients, double hermitian_tol = 1e-12);

  Eigen::Index dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return coefficients_.size(); }
  const std::vector<CMatrix>& coefficients() const noexcept { return coefficients_; }

  /// A_i -> U A_i U^*.
  HermitianPencil congruent(const CMatrix& u) const;

 private:
  Eigen::Index n_ = 0;
  std::vector<CMatrix> coefficients_;
};

/// X -> sum_i A_i X A_i.
CpMap covariance_map(const HermitianPencil& pencil);

/// Subspace pair with A_i(R) inside L for all i and dim R > dim L.
struct ShrunkWitness {
  CMatrix right;  // orthonormal columns spanning R
  CMatrix left;   // orthonormal columns spanning L (possibly zero columns)
  double residual = 0.0;  // max_i ||(I - P_L) A_i P_R||_2
};

inline constexpr double kWitnessTol = 1e-8;

/// Alternating subspace search for a shrunk subspace. A returned witness is
/// certified (residual <= 1e-8 relative to max ||A_i||); absence is not a
/// proof of fullness.
std::optional<ShrunkWitness> shrunk_subspace_search(const HermitianPencil& pencil, std::uint64_t seed,
                                                    int restarts = 8);

struct BlockDecomposition {
  CMatrix u_left;   // unitary
  CMatrix u_right;  // unitary
  std::vector<int> blocks;
  double off_block_mass = 0.0;  // max_i ||off-block part of U_L^* B_i U_R||_F
};

/// Simultaneous block diagonalization of a doubly stochastic Kraus list via
/// the commutant of the *-algebra generated by {B_j^* B_i}. Throws
/// PreconditionViolated when sum B_i^* B_i or sum B_i B_i^* is off I by more
/// than 1e-6.
BlockDecomposition block_diagonalize_ds(const std::vector<CMatrix>& kraus, std::uint64_t seed);

/// Dimension of the commutant of the *-algebra generated by `generators`.
int commutant_dimension(const std::vector<CMatrix>& generators);

enum class Verdict { NotFull, FullNotLRSemisimple, LRSemisimple, Unsplittable, Inconclusive };
std::string to_string(Verdict v);

struct BlockStructure {
  std::vector<int> sizes;
  CMatrix left;   // L
  CMatrix right;  // R, with L A_i R block diagonal
  double residual = 0.0;  // max_i ||L A_i R - blockdiag|| / ||L A_i R||
};

struct SinkhornSummary {
  SinkhornStatus status = SinkhornStatus::Budget;
  DivergenceReason reason = DivergenceReason::None;
  int iterations = 0;
  double final_ds = 0.0;
  double condition = 1.0;
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<BlockStructure> blocks;
  std::optional<ShrunkWitness> witness;
  SinkhornSummary sinkhorn;
};

struct ClassifyConfig {
  SinkhornConfig sinkhorn;
  std::uint64_t seed = 42;
  int restarts = 8;
};

/// Shrunk-subspace search, then Sinkhorn and block diagonalization of the
/// doubly stochastic scaling.
Classification classify(const HermitianPencil& pencil, const ClassifyConfig& cfg = {});

}  // namespace semicircle
