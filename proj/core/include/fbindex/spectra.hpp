#pragma once

// Morse index and low spectrum of the pencil (K, M).
//
// Since M is positive definite on the free dofs, the number of negative
// eigenvalues of K·φ = λ·M·φ equals the number of negative eigenvalues of K
// (Sylvester). The same holds for the shifted pencil, so inertia of K − σM
// counts eigenvalues below σ without computing any of them.

#include "fbindex/envelope.hpp"
#include "fbindex/fem.hpp"

#include <span>
#include <vector>

namespace fbindex {

inline constexpr double kDefaultZeroTol = 1e-9;
// Largest dimension accepted by the dense eigenpair path.
inline constexpr int kDenseLimit = 4000;

struct SpectralResult {
    Inertia inertia;
    std::vector<double> eigenvalues;                // ascending, first k
    std::vector<std::vector<double>> eigenvectors;  // per free dof, M-orthonormal
    double zero_threshold = 0.0;                    // |λ| below this counts as zero
};

// zero_tol·‖K‖_∞, the absolute window for classifying an eigenvalue as zero.
double zero_threshold(const AssembledForms& forms, double zero_tol);

// Discrete Morse index as an inertia triple. Eigenvalues with
// |λ| < zero_tol·‖K‖_∞ are reported as zero; with zero_tol = 0 the triple is
// the exact inertia of K.
Inertia morse_index(const AssembledForms& forms, double zero_tol = kDefaultZeroTol);

// Number of pencil eigenvalues strictly below sigma.
int count_eigenvalues_below(const AssembledForms& forms, double sigma);

// Number of pencil eigenvalues in the open window (-delta, delta).
int count_eigenvalues_near_zero(const AssembledForms& forms, double delta);

// j-th smallest pencil eigenvalue (1-based) by bisection on inertia counts
// ("spectrum slicing"). [lo, hi] must bracket it: count(lo) < j <= count(hi).
double eigenvalue_by_slicing(const AssembledForms& forms, int j, double lo, double hi, double tol = 1e-12);

// Lowest k eigenpairs by the dense path: Cholesky of M, reduction to a
// standard symmetric problem, tridiagonalization and implicit QR. The
// inertia field classifies all eigenvalues with the zero window above.
// Throws ArgumentError when the dimension exceeds kDenseLimit.
SpectralResult lowest_eigenpairs(const AssembledForms& forms, int k, double zero_tol = kDefaultZeroTol);

// True when the nonzero entries of v share one sign after normalizing the
// sign at the entry of largest magnitude; entries with |v_i| <= tol·max|v|
// are ignored only when tol > 0.
bool sign_definite(std::span<const double> v, double tol = 0.0);

}  // namespace fbindex
