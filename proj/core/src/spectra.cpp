#include "fbindex/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <string>

namespace fbindex {

namespace {

SparseMatrix shifted(const AssembledForms& forms, double sigma) {
    SparseMatrix s = forms.K - sigma * forms.M_free;
    s.makeCompressed();
    return s;
}

}  // namespace

double zero_threshold(const AssembledForms& forms, double zero_tol) {
    if (zero_tol < 0.0) throw ArgumentError("zero_tol must be nonnegative");
    return zero_tol * inf_norm(forms.K);
}

Inertia morse_index(const AssembledForms& forms, double zero_tol) {
    const double tau = zero_threshold(forms, zero_tol);
    const int n = forms.dimension();
    if (tau == 0.0) return ldlt_inertia(forms.K);
    const Inertia below_minus = ldlt_inertia(shifted(forms, -tau));
    const Inertia below_plus = ldlt_inertia(shifted(forms, tau));
    // an eigenvalue equal to -tau lands in the zero count of K + tau·M; it is
    // outside the open window and counts as negative
    Inertia out;
    out.negative = below_minus.negative + below_minus.zero;
    out.zero = below_plus.negative - out.negative;
    out.positive = n - out.negative - out.zero;
    return out;
}

int count_eigenvalues_below(const AssembledForms& forms, double sigma) {
    return ldlt_inertia(shifted(forms, sigma)).negative;
}

int count_eigenvalues_near_zero(const AssembledForms& forms, double delta) {
    if (!(delta > 0.0)) throw ArgumentError("count_eigenvalues_near_zero: delta must be positive");
    const Inertia lo = ldlt_inertia(shifted(forms, -delta));
    return count_eigenvalues_below(forms, delta) - lo.negative - lo.zero;
}

double eigenvalue_by_slicing(const AssembledForms& forms, int j, double lo, double hi, double tol) {
    if (j < 1 || j > forms.dimension()) throw ArgumentError("eigenvalue_by_slicing: index out of range");
    if (!(lo < hi)) throw ArgumentError("eigenvalue_by_slicing: need lo < hi");
    if (count_eigenvalues_below(forms, lo) >= j || count_eigenvalues_below(forms, hi) < j) {
        throw ArgumentError("eigenvalue_by_slicing: [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] does not bracket eigenvalue " + std::to_string(j));
    }
    while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_eigenvalues_below(forms, mid) >= j) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SpectralResult lowest_eigenpairs(const AssembledForms& forms, int k, double zero_tol) {
    const int n = forms.dimension();
    if (n > kDenseLimit) {
        throw ArgumentError("lowest_eigenpairs: dimension " + std::to_string(n) + " exceeds the dense limit " +
                            std::to_string(kDenseLimit) + "; use morse_index for inertia");
    }
    if (k < 0 || k > n) throw ArgumentError("lowest_eigenpairs: k out of range");
    SpectralResult out;
    out.zero_threshold = zero_threshold(forms, zero_tol);
    if (n == 0) return out;

    Eigen::MatrixXd c(forms.K);
    Eigen::MatrixXd l(forms.M_free);
    auto check = [](lapack_int info, const char* what) {
        if (info != 0) throw NumericalError(std::string(what) + " failed with info = " + std::to_string(info));
    };
    // M = L Lᵀ, C = L⁻¹ K L⁻ᵀ, C = Q T Qᵀ
    check(LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, l.data(), n), "dpotrf (mass matrix)");
    check(LAPACKE_dsygst(LAPACK_COL_MAJOR, 1, 'L', n, c.data(), n, l.data(), n), "dsygst");
    Eigen::VectorXd diag(n), offdiag(std::max(n - 1, 1)), tau(std::max(n - 1, 1));
    check(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, c.data(), n, diag.data(), offdiag.data(), tau.data()), "dsytrd");

    // every eigenvalue of T by bisection (needed for the inertia)
    lapack_int m = 0, nsplit = 0;
    Eigen::VectorXd w(n);
    std::vector<lapack_int> iblock(static_cast<std::size_t>(n)), isplit(static_cast<std::size_t>(n));
    check(LAPACKE_dstebz('A', 'E', n, 0.0, 0.0, 0, 0, 0.0, diag.data(), offdiag.data(), &m, &nsplit, w.data(),
                         iblock.data(), isplit.data()),
          "dstebz");
    if (m != n) throw NumericalError("dstebz returned an incomplete spectrum");

    for (int i = 0; i < n; ++i) {
        if (w[i] <= -out.zero_threshold) ++out.inertia.negative;
        else if (w[i] >= out.zero_threshold) ++out.inertia.positive;
        else ++out.inertia.zero;
    }
    if (k == 0) return out;

    // the first k again in block order, as dstein requires when T splits
    lapack_int mk = 0;
    Eigen::VectorXd wk(n);
    check(LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, 1, k, 0.0, diag.data(), offdiag.data(), &mk, &nsplit, wk.data(),
                         iblock.data(), isplit.data()),
          "dstebz");
    if (mk != k) throw NumericalError("dstebz returned the wrong number of eigenvalues");

    // vectors of T, then back to the pencil: φ = L⁻ᵀ Q y
    Eigen::MatrixXd z(n, k);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(k));
    check(LAPACKE_dstein(LAPACK_COL_MAJOR, n, diag.data(), offdiag.data(), k, wk.data(), iblock.data(),
                         isplit.data(), z.data(), n, ifail.data()),
          "dstein");
    check(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, k, c.data(), n, tau.data(), z.data(), n), "dormtr");
    const Eigen::MatrixXd phi = l.triangularView<Eigen::Lower>().transpose().solve(z);

    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return wk[a] < wk[b]; });
    for (int i : order) {
        out.eigenvalues.push_back(wk[i]);
        out.eigenvectors.emplace_back(phi.col(i).data(), phi.col(i).data() + n);
    }
    return out;
}

bool sign_definite(std::span<const double> v, double tol) {
    if (v.empty()) return true;
    const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double ref = *it;
    if (ref == 0.0) return false;
    const double cutoff = tol * std::abs(ref);
    return std::all_of(v.begin(), v.end(), [&](double x) {
        const double s = x * (ref > 0.0 ? 1.0 : -1.0);
        return tol > 0.0 ? s > -cutoff : s > 0.0;
    });
}

}  // namespace fbindex
