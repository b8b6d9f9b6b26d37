#pragma once

// Envelope (variable-band) symmetric factorizations under a reverse
// Cuthill–McKee ordering.
//
// The inertia path runs a right-looking LDLᵀ with the following fixed
// pivoting rule at step k (α = (1 + √17)/8, σ = max_{i>k} |a_ik|):
//
//   1. |a_kk| >= α·σ and a_kk != 0                   -> 1x1 pivot
//   2. else the adjacent 2x2 block D on (k, k+1), if
//      |det D| > ε·(|a_kk| + 2|a_{k+1,k}| + |a_{k+1,k+1}|)²,
//      or a_kk = 0 and det D != 0                     -> 2x2 pivot
//   3. else a_kk != 0                                  -> 1x1 pivot
//   4. else column k is identically zero               -> zero eigenvalue
//   5. otherwise                                       -> NumericalError
//
// No symmetric interchanges are made, so the envelope never grows and the
// result is reproducible bit for bit. By Sylvester's law the signs of the
// D blocks give the inertia of the input matrix.

#include "fbindex/common.hpp"

#include <Eigen/Sparse>

#include <span>
#include <vector>

namespace fbindex {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;

    int dimension() const { return negative + zero + positive; }
    bool operator==(const Inertia&) const = default;
};

// Reverse Cuthill–McKee ordering of the symmetric sparsity pattern.
// Returns perm with perm[new_index] = old_index. Ties are broken by
// (degree, index), starting each component at a minimum-degree vertex.
std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a);

// Lower envelope of a symmetric matrix in a given ordering. Row i stores
// columns first[i]..i; first[] is made nondecreasing.
class EnvelopeMatrix {
public:
    EnvelopeMatrix(const SparseMatrix& a, std::span<const int> perm);

    int size() const { return static_cast<int>(first_.size()); }
    std::size_t stored_entries() const { return values_.size(); }
    int bandwidth() const;

    double& at(int i, int j) { return values_[offset_[i] + (j - first_[i])]; }
    double at(int i, int j) const { return values_[offset_[i] + (j - first_[i])]; }
    bool in_envelope(int i, int j) const { return j <= i && j >= first_[i]; }
    int first(int i) const { return first_[i]; }
    // Largest row index whose envelope reaches column k.
    int last_row(int k) const { return last_[k]; }

private:
    std::vector<int> first_;
    std::vector<int> last_;
    std::vector<std::size_t> offset_;
    std::vector<double> values_;
};

// Inertia of a symmetric sparse matrix by the pivoted envelope LDLᵀ above.
// Exact zero pivot blocks are counted as zero eigenvalues.
Inertia ldlt_inertia(const SparseMatrix& a);

// Envelope Cholesky factorization. Construction throws StabilityViolation
// when a pivot is not positive.
class EnvelopeCholesky {
public:
    explicit EnvelopeCholesky(const SparseMatrix& a);

    int size() const { return factor_.size(); }
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<int> perm_;
    EnvelopeMatrix factor_;
};

}  // namespace fbindex
