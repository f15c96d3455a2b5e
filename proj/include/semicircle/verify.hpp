#pragma once

// Runs the module invariants against a single pencil.

#include <cstdint>
#include <string>
#include <vector>

#include "semicircle/io.hpp"
#include "semicircle/pencil.hpp"
#include "semicircle/spectra.hpp"

namespace semicircle {

struct CheckResult {
  std::string name;
  bool passed = true;
  bool skipped = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct VerifyConfig {
  ClassifyConfig classify;
  BoundaryLimitConfig density;
  int trials = 20;
  std::uint64_t seed = 42;
};

struct VerifyReport {
  std::string verdict;
  std::vector<CheckResult> checks;
  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

VerifyReport verify_pencil(const HermitianPencil& pencil, const VerifyConfig& cfg = {});

// A 2-cycle D -> eta(D)^{-1} -> D for self-adjoint eta.
struct CertifiedCycle {
  CMatrix first;
  CMatrix second;
  double residual = 0.0;  // ||F(second) - first||_F / ||first||_F
};

/// Two-cycles C^{1/2} t exp(sZ) C^{1/2} with Z drawn from the +1 eigenspace
/// of the DS-normalized map at the fixed point C.
std::vector<CertifiedCycle> certified_cycles(const CpMap& eta, const CMatrix& c, int count, std::uint64_t seed);

/// ||F(gamma(t)) - gamma(1-t)||_F on t in {0, 1/4, 1/2, 3/4, 1}, F(X) = eta(X)^{-1},
/// relative to max(||first||, ||second||).
double reflection_defect(const CpMap& eta, const CertifiedCycle& cycle);

/// max_t ||eta~(P^t) - P^{t-1}||_F after conjugating eta by the first element.
double interpolation_defect(const CpMap& eta, const CertifiedCycle& cycle);

io::Json to_json(const VerifyReport& report);

}  // namespace semicircle
