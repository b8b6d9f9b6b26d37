#include "fbindex/disk_oracle.hpp"
#include "fbindex/fem.hpp"
#include "fbindex/spectra.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fbindex;
using doctest::Approx;

namespace {

// Root of x·B_k'(x) − B_k(x) from Boost's Bessel functions (independent of the series).
double boost_secular_root(bool modified, int k, double lo, double hi) {
    auto f = [&](double x) {
        if (modified) {
            const double d = k == 0 ? boost::math::cyl_bessel_i(1, x)
                                    : 0.5 * (boost::math::cyl_bessel_i(k - 1, x) + boost::math::cyl_bessel_i(k + 1, x));
            return x * d - boost::math::cyl_bessel_i(k, x);
        }
        const double d = k == 0 ? -boost::math::cyl_bessel_j(1, x)
                                : 0.5 * (boost::math::cyl_bessel_j(k - 1, x) - boost::math::cyl_bessel_j(k + 1, x));
        return x * d - boost::math::cyl_bessel_j(k, x);
    };
    std::uintmax_t iters = 200;
    const auto [a, b] =
        boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("Bessel series") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);

    // I_0(1) = Σ 1/(4^m (m!)²), twelve terms
    double partial = 0.0, term = 1.0;
    for (int m = 0; m < 12; ++m) {
        partial += term;
        term /= 4.0 * (m + 1) * (m + 1);
    }
    CHECK(bessel_i(0, 1.0) == Approx(partial).epsilon(1e-15));
    CHECK(bessel_i(0, 1.0) == Approx(1.2660658).epsilon(1e-7));

    SUBCASE("against Boost.Math") {
        for (int k : {0, 1, 2, 5, 13, 30, 50}) {
            for (double x : {0.01, 0.5, 1.0, 3.7, 10.0, 22.0, 30.0}) {
                CAPTURE(k);
                CAPTURE(x);
                const double iref = boost::math::cyl_bessel_i(k, x);
                if (iref > 1e-290) CHECK(bessel_i(k, x) == Approx(iref).epsilon(1e-13));
                const double jref = boost::math::cyl_bessel_j(k, x);
                const double jtol = x <= 10.0 ? 1e-13 : 1e-8;
                CHECK(std::abs(bessel_j(k, x) - jref) <= jtol * std::max(1.0, std::abs(jref)));
            }
        }
    }
    SUBCASE("first zero of J_0 by bisection on the series") {
        double lo = 2.0, hi = 3.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (bessel_j(0, mid) > 0 ? lo : hi) = mid;
        }
        CHECK(lo == Approx(2.404826).epsilon(1e-6));
        CHECK(lo == Approx(boost::math::cyl_bessel_j_zero(0.0, 1)).epsilon(1e-12));
    }
    SUBCASE("derivative identities against central differences") {
        for (int k : {0, 1, 3}) {
            for (double x : {0.7, 2.0, 6.5}) {
                const double h = 1e-5;
                CHECK(bessel_i_derivative(k, x) ==
                      Approx((bessel_i(k, x + h) - bessel_i(k, x - h)) / (2 * h)).epsilon(1e-8));
                CHECK(bessel_j_derivative(k, x) ==
                      Approx((bessel_j(k, x + h) - bessel_j(k, x - h)) / (2 * h)).epsilon(1e-7).scale(1e-8));
            }
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(bessel_i(51, 1.0), DomainError);
        CHECK_THROWS_AS(bessel_i(-1, 1.0), DomainError);
        CHECK_THROWS_AS(bessel_j(0, 30.5), DomainError);
        CHECK_THROWS_AS(bessel_j(0, -0.1), DomainError);
    }
}

TEST_CASE("secular functions at the origin") {
    CHECK(secular_i(0, 0.0) == -1.0);
    CHECK(secular_j(0, 0.0) == -1.0);
    for (int k = 1; k <= 5; ++k) {
        CHECK(secular_i(k, 0.0) == 0.0);
        CHECK(secular_j(k, 0.0) == 0.0);
    }
}

TEST_CASE("negative spectrum of Q0") {
    const auto neg = negative_eigenvalues_q0();
    REQUIRE(neg.size() == 1);
    const auto& e = neg.front();
    CHECK(e.k == 0);
    CHECK(e.multiplicity == 1);
    CHECK(e.profile == RadialProfile::ModifiedBesselI);
    CHECK(e.x > 1.60);
    CHECK(e.x < 1.62);
    CHECK(secular_i(0, 1.6) < 0.0);
    CHECK(secular_i(0, 1.65) > 0.0);
    CHECK(e.lambda == Approx(-e.x * e.x));
    CHECK(e.x == Approx(boost_secular_root(true, 0, 1.6, 1.65)).epsilon(1e-11));
    CHECK(e.lambda == Approx(-2.59).epsilon(2e-3));

    for (int k = 1; k <= 8; ++k) CHECK(min_log_derivative_ratio_i(k) >= 1.0 - 1e-12);
}

TEST_CASE("nonnegative spectrum of Q0") {
    const auto pos = positive_eigenvalues_q0(4, 3);
    bool zero_mode = false;
    for (int k = 0; k <= 4; ++k) {
        std::vector<double> lam;
        for (const auto& e : pos) {
            if (e.k != k) continue;
            lam.push_back(e.lambda);
            CHECK(e.lambda >= 0.0);
            CHECK(e.multiplicity == (k == 0 ? 1 : 2));
            if (e.x == 0.0) {
                CHECK(k == 1);
                CHECK(e.profile == RadialProfile::Power);
                zero_mode = true;
            } else {
                CHECK(std::abs(secular_j(k, e.x)) < 1e-9);
                CHECK(e.x == Approx(boost_secular_root(false, k, e.x - 1e-3, e.x + 1e-3)).epsilon(1e-11));
            }
        }
        CHECK(std::is_sorted(lam.begin(), lam.end()));
        CHECK(!lam.empty());
    }
    CHECK(zero_mode);
}

TEST_CASE("Fourier identity for Q0") {
    FourierHarmonic one;
    one.a = 1.0;
    CHECK(q0_value(one) == Approx(-2 * kPi));
    FourierHarmonic c1;
    c1.c = {1.0};
    CHECK(q0_value(c1) == Approx(0.0));
    FourierHarmonic c2;
    c2.c = {0.0, 1.0};
    CHECK(q0_value(c2) == Approx(1.0));

    SUBCASE("agrees with direct quadrature for 100 random harmonics") {
        using GL = boost::math::quadrature::gauss<double, 30>;
        std::mt19937_64 rng(42);
        std::normal_distribution<double> n01;
        for (int trial = 0; trial < 100; ++trial) {
            FourierHarmonic h;
            h.a = n01(rng);
            const int kmax = 1 + trial % 6;
            for (int k = 0; k < kmax; ++k) {
                h.c.push_back(n01(rng));
                h.d.push_back(n01(rng));
            }
            // ∫_D |∇h|² in polar coordinates, split into angular panels
            const int panels = 8;
            double dirichlet = 0.0, boundary = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double t0 = 2 * kPi * p / panels, t1 = 2 * kPi * (p + 1) / panels;
                dirichlet += GL::integrate(
                    [&](double t) {
                        return GL::integrate(
                            [&](double r) {
                                const auto [gr, gt] = h.gradient_polar(r, t);
                                return (gr * gr + gt * gt) * r;
                            },
                            0.0, 1.0);
                    },
                    t0, t1);
                boundary += GL::integrate([&](double t) { return std::pow(h.value(1.0, t), 2); }, t0, t1);
            }
            CAPTURE(trial);
            CHECK(dirichlet - boundary == Approx(q0_value(h)).epsilon(1e-10).scale(1.0));
            if (trial % 2 == 0) {
                FourierHarmonic w = h;
                w.a = 0.0;
                CHECK(q0_value(w) >= 0.0);
            }
        }
    }
}

TEST_CASE("FEM on the disk against the oracle") {
    const double lambda1 = negative_eigenvalues_q0().front().lambda;
    double lowest_positive = 1e300;
    for (const auto& e : positive_eigenvalues_q0(6, 2)) {
        if (e.lambda > 0.0) lowest_positive = std::min(lowest_positive, e.lambda);
    }
    // observed order log(e_prev/e)/log(n/n_prev); the coarse levels are slightly super-quadratic
    auto order = [](double e0, double e1, int n0, int n1) { return std::log(e0 / e1) / std::log(double(n1) / n0); };
    double prev1 = 0.0, prev4 = 0.0;
    int prev_n = 0;
    for (int n : {8, 16, 24}) {
        const SpectralResult s = lowest_eigenpairs(assemble(disk_mesh(n)), 4);
        const double err1 = s.eigenvalues[0] - lambda1;
        const double err4 = std::abs(s.eigenvalues[3] - lowest_positive);
        CHECK(err1 > 0.0);  // Rayleigh–Ritz overestimates
        if (prev1 > 0.0) {
            const double p1 = order(prev1, err1, prev_n, n), p4 = order(prev4, err4, prev_n, n);
            MESSAGE("n=" << n << " orders " << p1 << " " << p4);
            CHECK(p1 > 1.7);
            CHECK(p1 < 2.6);
            CHECK(p4 > 1.7);
            CHECK(p4 < 2.6);
        }
        prev_n = n;
        prev1 = err1;
        prev4 = err4;
    }

    SUBCASE("interpolated eigenfunction: Rayleigh quotient and distance decay at O(h^2)") {
        const double x = negative_eigenvalues_q0().front().x;
        double prev_rq = 0.0, prev_dist = 0.0;
        for (int n : {6, 12, 24}) {
            const TriMesh m = disk_mesh(n);
            const AssembledForms f = assemble(m);
            Eigen::VectorXd psi(f.dimension());
            for (int d = 0; d < f.dimension(); ++d) psi[d] = bessel_i(0, x * norm(m.vertices[f.free_dofs[d]]));
            psi /= std::sqrt(psi.dot(f.M_free * psi));
            const double rq = std::abs(psi.dot(f.K * psi) - lambda1) / std::abs(lambda1);
            const SpectralResult s = lowest_eigenpairs(f, 1);
            Eigen::Map<const Eigen::VectorXd> phi(s.eigenvectors[0].data(), f.dimension());
            const Eigen::VectorXd diff = (phi.dot(f.M_free * psi) > 0 ? 1.0 : -1.0) * phi - psi;
            const double dist = std::sqrt(diff.dot(f.M_free * diff));
            if (prev_rq > 0.0) {
                CHECK(prev_rq / rq > 3.0);
                CHECK(prev_dist / dist > 3.0);
            }
            prev_rq = rq;
            prev_dist = dist;
        }
    }
}
