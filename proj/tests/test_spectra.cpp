#include "fbindex/envelope.hpp"
#include "fbindex/fem.hpp"
#include "fbindex/spectra.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

using namespace fbindex;
using doctest::Approx;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

Inertia dense_inertia(const Eigen::MatrixXd& a, double tol) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    Inertia in;
    for (double x : ev) {
        if (x < -tol) ++in.negative;
        else if (x > tol) ++in.positive;
        else ++in.zero;
    }
    return in;
}

// Random symmetric matrix with a banded-plus-scattered pattern; some
// diagonals zeroed so 2x2 pivots are needed.
Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = u(rng) < -0.7 ? 0.0 : 3.0 * u(rng);
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = u(rng);
    }
    for (int k = 0; k < n; ++k) {
        const int i = pick(rng), j = pick(rng);
        if (i != j) a(i, j) = a(j, i) = u(rng);
    }
    return a;
}

double norm_in(const SparseMatrix& m, const Eigen::VectorXd& v) { return std::sqrt(v.dot(m * v)); }

}  // namespace

TEST_CASE("inertia of small matrices") {
    Eigen::MatrixXd d(2, 2);
    d << -1, 0, 0, 2;
    CHECK(ldlt_inertia(sparse(d)) == Inertia{1, 0, 1});

    Eigen::MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK(ldlt_inertia(sparse(swap)) == Inertia{1, 0, 1});

    Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(3, 3);
    sing(0, 0) = 2.0;
    CHECK(ldlt_inertia(sparse(sing)) == Inertia{0, 2, 1});
}

TEST_CASE("inertia matches a dense eigensolver on random symmetric matrices") {
    std::mt19937_64 rng(7);
    int matched = 0, breakdowns = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 40;
        Eigen::MatrixXd a = random_symmetric(rng, n);
        const bool full_diagonal = trial % 2 == 0;
        if (full_diagonal) {
            for (int i = 0; i < n; ++i) {
                if (a(i, i) == 0.0) a(i, i) = 0.5;
            }
        }
        const Inertia dense = dense_inertia(a, 1e-10);
        if (dense.zero > 0) continue;  // exact-zero classification differs in roundoff
        CAPTURE(trial);
        try {
            const Inertia got = ldlt_inertia(sparse(a));
            CHECK(got == dense);
            ++matched;
        } catch (const NumericalError& e) {
            // Without interchanges a zero pivot with a singular 2x2 partner is a
            // reported breakdown, never a wrong count; nonzero diagonals avoid it
            // up to exact cancellation.
            CHECK_FALSE(full_diagonal);
            CHECK(std::string(e.what()).find("pivot") != std::string::npos);
            ++breakdowns;
        }
    }
    CHECK(matched > 200);
    MESSAGE("breakdowns on zero-diagonal matrices: " << breakdowns);
}

TEST_CASE("inertia of shifted pencils K - sigma*M matches the dense spectrum") {
    for (const TriMesh& m : {disk_mesh(5), annulus_mesh(3.5, 5, 24), hairpin_mesh(2.0, 12, 6)}) {
        const AssembledForms f = assemble(m);
        const Eigen::MatrixXd K = Eigen::MatrixXd(f.K), M = Eigen::MatrixXd(f.M_free);
        const Eigen::VectorXd ev = Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(K, M).eigenvalues();
        for (double sigma : {-3.0, -0.5, -0.01, 0.37, 2.0, 15.0}) {
            const SparseMatrix shifted = f.K - sigma * f.M_free;
            const int below = static_cast<int>((ev.array() < sigma).count());
            CHECK(ldlt_inertia(shifted).negative == below);
            CHECK(count_eigenvalues_below(f, sigma) == below);
        }
    }
}

TEST_CASE("reverse Cuthill-McKee returns a permutation and shrinks the band") {
    const AssembledForms f = assemble(annulus_mesh(3.0, 6, 40));
    const auto perm = reverse_cuthill_mckee(f.K);
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> iota(perm.size());
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    std::vector<int> identity(perm.size());
    std::iota(identity.begin(), identity.end(), 0);
    const EnvelopeMatrix natural(f.K, identity), ordered(f.K, perm);
    CHECK(ordered.stored_entries() <= natural.stored_entries());
}

TEST_CASE("Morse index of annulus truncations") {
    CHECK(morse_index(assemble(annulus_mesh(2.0, 16, 64))).negative == 0);
    CHECK(morse_index(assemble(annulus_mesh(4.0, 24, 64))).negative == 1);
    CHECK(morse_index(assemble(plane_mesh(4.0, 16))) == Inertia{0, 0, 2 * 15 * 16 + 16});
}

TEST_CASE("dense eigenpairs") {
    for (const TriMesh& m : {disk_mesh(6), annulus_mesh(3.0, 6, 32), hairpin_mesh(2.0, 16, 8), plane_mesh(2.0, 8)}) {
        const AssembledForms f = assemble(m);
        const SpectralResult s = lowest_eigenpairs(f, 4);
        REQUIRE(s.eigenvalues.size() == 4);
        CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
        CHECK(s.inertia.dimension() == f.dimension());
        CHECK(s.inertia == morse_index(f));
        for (std::size_t k = 0; k < 4; ++k) {
            const Eigen::Map<const Eigen::VectorXd> phi(s.eigenvectors[k].data(), f.dimension());
            const Eigen::VectorXd kphi = f.K * phi;
            const double res = (kphi - s.eigenvalues[k] * (f.M_free * phi)).norm();
            CHECK(res <= 1e-8 * kphi.norm() + 1e-12);
            for (std::size_t l = 0; l <= k; ++l) {
                const Eigen::Map<const Eigen::VectorXd> psi(s.eigenvectors[l].data(), f.dimension());
                CHECK(std::abs(psi.dot(f.M_free * phi) - (k == l ? 1.0 : 0.0)) < 1e-10);
            }
            // slicing agrees with the dense value
            const double lam = s.eigenvalues[k];
            const double pad = 1e-6 * (1.0 + std::abs(lam));
            if (k == 0 || s.eigenvalues[k] - s.eigenvalues[k - 1] > 1e-5) {
                CHECK(count_eigenvalues_below(f, lam - pad) == static_cast<int>(k));
            }
        }
        CHECK(sign_definite(s.eigenvectors.front()));
        CHECK(eigenvalue_by_slicing(f, 1, s.eigenvalues[0] - 1.0, s.eigenvalues[0] + 0.5 * (s.eigenvalues[1] - s.eigenvalues[0])) ==
              Approx(s.eigenvalues[0]).epsilon(1e-10));
    }
    SUBCASE("plane: every eigenvalue is positive") {
        const SpectralResult s = lowest_eigenpairs(assemble(plane_mesh(3.0, 8)), 1);
        CHECK(s.eigenvalues[0] > 0.0);
        CHECK(s.inertia.negative == 0);
    }
    SUBCASE("over the dense bound") {
        const AssembledForms big = assemble(annulus_mesh(3.0, 40, 128));
        REQUIRE(big.dimension() > kDenseLimit);
        CHECK_THROWS_AS(lowest_eigenpairs(big, 1), ArgumentError);
    }
}

TEST_CASE("disk form: one negative eigenvalue and an O(h^2) zero pair") {
    double prev = 0.0;
    double prev_gap = 0.0;
    for (int n : {6, 12, 24}) {
        const SpectralResult s = lowest_eigenpairs(assemble(disk_mesh(n)), 4);
        CHECK(s.inertia.negative == 1);
        const double zero_pair = std::max(std::abs(s.eigenvalues[1]), std::abs(s.eigenvalues[2]));
        const double gap = s.eigenvalues[1] - s.eigenvalues[0];
        CHECK(std::abs(s.eigenvalues[1] - s.eigenvalues[2]) < 1e-8);
        if (prev > 0.0) {
            CHECK(prev / zero_pair == Approx(4.0).epsilon(0.1));
            CHECK(gap == Approx(prev_gap).epsilon(0.01));  // simple λ₁, gap bounded away from 0
        }
        prev = zero_pair;
        prev_gap = gap;
    }
}

TEST_CASE("critical annulus: lambda_1 -> 0 at O(h^2) with eigenfunction log(R/r)") {
    const double R = std::exp(1.0);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const int nr = 4 << level, nt = 16 << level;
        const TriMesh m = annulus_mesh(R, nr, nt);
        const AssembledForms f = assemble(m);
        const SpectralResult s = lowest_eigenpairs(f, 1);
        const double lam = std::abs(s.eigenvalues[0]);
        if (level > 0) CHECK(prev / lam == Approx(4.0).epsilon(0.1));
        prev = lam;

        // compare with the normalized radial profile
        Eigen::VectorXd exact(f.dimension());
        for (int d = 0; d < f.dimension(); ++d) exact[d] = std::log(R / norm(m.vertices[f.free_dofs[d]]));
        exact /= norm_in(f.M_free, exact);
        Eigen::Map<const Eigen::VectorXd> phi(s.eigenvectors[0].data(), f.dimension());
        const double sign = phi.dot(f.M_free * exact) > 0 ? 1.0 : -1.0;
        CHECK(norm_in(f.M_free, sign * phi - exact) < 0.05);
    }
}

TEST_CASE("zero window and sign helper") {
    const AssembledForms f = assemble(disk_mesh(4));
    CHECK(zero_threshold(f, 1e-9) == Approx(1e-9 * inf_norm(f.K)));
    CHECK(count_eigenvalues_near_zero(f, 0.5) == 2);

    const std::vector<double> pos{0.1, 2.0, 0.3}, neg{-0.1, -2.0, -1e-300}, mixed{-0.1, 2.0, 0.3}, zero{0, 0};
    CHECK(sign_definite(pos));
    CHECK(sign_definite(neg));
    CHECK_FALSE(sign_definite(mixed));
    CHECK_FALSE(sign_definite(zero));
    const std::vector<double> tiny_ripple{1.0, 0.5, -1e-14};
    CHECK_FALSE(sign_definite(tiny_ripple));
    CHECK(sign_definite(tiny_ripple, 1e-10));
}
