#pragma once

// Closed-form reference solutions, independent of the HFS and scaling solvers.

#include <array>
#include <cstdint>

#include "semicircle/cpmap.hpp"

namespace semicircle::oracle {

/// (1/2pi) sqrt(4 - x^2) on [-2, 2], zero outside.
double wigner_density(double x);

/// Semicircle of variance sigma2: support [-2 sigma, 2 sigma].
double semicircle_density(double x, double sigma2);

/// 3 sqrt(3) / 2, the edge of the cubic-cusp density.
double cubic_edge();

/// Roots of v^3 - z v^2 + z = 0 via companion-matrix eigenvalues.
std::array<Complex, 3> cubic_roots(Complex z);

/// Boundary root v(x) with Im v > 0 for 0 < |x| < 3 sqrt(3)/2.
Complex cubic_boundary_root(double x);

/// (Im v / 2pi)(1 + 1/|v|^2) inside the support, 0 outside. Throws
/// InvalidInput at x = 0.
double cubic_density(double x);

struct DiagonalFamilyMember {
  CMatrix c;
  bool in_solution_set = true;
};

/// diag(t, 1/(3t)), the solution set of eta(C) C = I for the 2x2 pencil
/// A1 = [[0, 1+i], [1-i, 0]], A2 = [[0, 1], [1, 0]]. Throws InvalidInput for t <= 0.
DiagonalFamilyMember diag_family_solution(double t);

/// Multi-start Nelder-Mead minimization of det eta(B) over det-1 positive
/// definite 2x2 B = exp(a sx + b sy + c sz). An upper bound on the capacity.
double brute_capacity(const CpMap& eta, int samples, std::uint64_t seed);

}  // namespace semicircle::oracle
