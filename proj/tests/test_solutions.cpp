#include "fbindex/solutions.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace fbindex;
using doctest::Approx;

namespace {

const double e = std::exp(1.0);

// Additive recurrence (golden-ratio lattice) for low-discrepancy samples in [0,1)².
std::pair<double, double> r2(int i) {
    constexpr double g = 1.32471795724474602596;
    const double a = std::fmod(0.5 + i / g, 1.0);
    const double b = std::fmod(0.5 + i / (g * g), 1.0);
    return {a, b};
}

double u_at(SolutionKind kind, Vec2 z) { return evaluate(kind, z).u; }

Vec2 fd_grad(SolutionKind kind, Vec2 z, double h) {
    return {(u_at(kind, {z.x + h, z.y}) - u_at(kind, {z.x - h, z.y})) / (2 * h),
            (u_at(kind, {z.x, z.y + h}) - u_at(kind, {z.x, z.y - h})) / (2 * h)};
}

// |D²u|² from central differences of the analytic gradient.
double fd_hess_sq(SolutionKind kind, Vec2 z, double h) {
    const Vec2 gx = (evaluate(kind, {z.x + h, z.y}).grad - evaluate(kind, {z.x - h, z.y}).grad) * (0.5 / h);
    const Vec2 gy = (evaluate(kind, {z.x, z.y + h}).grad - evaluate(kind, {z.x, z.y - h}).grad) * (0.5 / h);
    return gx.x * gx.x + gx.y * gx.y + gy.x * gy.x + gy.y * gy.y;
}

double fd_laplacian(SolutionKind kind, Vec2 z, double h) {
    return (u_at(kind, {z.x + h, z.y}) + u_at(kind, {z.x - h, z.y}) + u_at(kind, {z.x, z.y + h}) +
            u_at(kind, {z.x, z.y - h}) - 4 * u_at(kind, z)) /
           (h * h);
}

}  // namespace

TEST_CASE("pointwise values") {
    SUBCASE("plane is affine") {
        const auto p = evaluate(SolutionKind::Plane, {2, 5});
        CHECK(p.u == 2.0);
        CHECK(p.grad == Vec2{1, 0});
        CHECK(p.hess_sq == 0.0);
    }
    SUBCASE("disk complement at (e, 0)") {
        const auto p = evaluate(SolutionKind::DiskComplement, {e, 0});
        CHECK(p.u == Approx(1.0).epsilon(1e-15));
        CHECK(p.grad.x == Approx(1 / e).epsilon(1e-15));
        CHECK(p.grad.y == Approx(0.0));
        CHECK(p.hess_sq == Approx(2 / std::pow(e, 4)).epsilon(1e-14));
        const Vec2 g = fd_grad(SolutionKind::DiskComplement, {e, 0}, 1e-5);
        CHECK(std::abs(g.x - p.grad.x) < 1e-8);
        CHECK(std::abs(g.y - p.grad.y) < 1e-8);
    }
    SUBCASE("hairpin centre") {
        const auto p = evaluate(SolutionKind::Hairpin, {0, 0});
        CHECK(p.u == Approx(1.0).epsilon(1e-14));
        CHECK(norm(p.grad) < 1e-14);
        CHECK(p.hess_sq == Approx(0.125).epsilon(1e-12));
        CHECK(fd_hess_sq(SolutionKind::Hairpin, {0, 0}, 1e-4) == Approx(0.125).epsilon(1e-6));
    }
    SUBCASE("outside the positive phase") {
        CHECK_THROWS_AS(evaluate(SolutionKind::Plane, {-1, 0}), DomainError);
        CHECK_THROWS_AS(evaluate(SolutionKind::DiskComplement, {0.5, 0}), DomainError);
        CHECK_THROWS_AS(evaluate(SolutionKind::Hairpin, {0, 3}), DomainError);
    }
}

TEST_CASE("finite-difference oracle for gradient and Hessian") {
    const std::array<std::pair<SolutionKind, Vec2>, 6> pts{{{SolutionKind::DiskComplement, {1.7, -0.4}},
                                                            {SolutionKind::DiskComplement, {-3.0, 2.0}},
                                                            {SolutionKind::Hairpin, {0.7, 1.1}},
                                                            {SolutionKind::Hairpin, {-2.0, -3.5}},
                                                            {SolutionKind::Hairpin, {4.0, 0.2}},
                                                            {SolutionKind::Plane, {0.3, 7.0}}}};
    for (const auto& [kind, z] : pts) {
        CAPTURE(z.x);
        CAPTURE(z.y);
        const auto p = evaluate(kind, z);
        const Vec2 g = fd_grad(kind, z, 1e-5);
        CHECK(norm(g - p.grad) < 1e-8);
        CHECK(fd_hess_sq(kind, z, 1e-5) == Approx(p.hess_sq).epsilon(1e-6).scale(1e-12));
    }
}

TEST_CASE("gradient bound |grad u| <= 1 at quasi-random interior points") {
    int strict_violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto [a, b] = r2(i);
        // disk complement: 1 < r < 50
        const double r = 1.0 + 1e-6 + 49.0 * a;
        const auto pd = evaluate(SolutionKind::DiskComplement, {r * std::cos(2 * kPi * b), r * std::sin(2 * kPi * b)});
        if (!(norm(pd.grad) < 1.0)) ++strict_violations;
        // hairpin: open strip, |s| < 6
        const Complex w{12.0 * a - 6.0, (b - 0.5) * (kPi - 1e-6)};
        const auto ph = evaluate_strip(w);
        if (!(norm(ph.grad) < 1.0)) ++strict_violations;
        const auto pp = evaluate(SolutionKind::Plane, {1e-3 + 10 * a, 20 * b - 10});
        CHECK(norm(pp.grad) <= 1.0);
    }
    CHECK(strict_violations == 0);
}

TEST_CASE("harmonicity: five-point Laplacian vanishes at O(step^2)") {
    for (auto [kind, z] : {std::pair{SolutionKind::DiskComplement, Vec2{1.5, 0.7}},
                           std::pair{SolutionKind::Hairpin, Vec2{0.4, -0.9}}}) {
        const double l1 = std::abs(fd_laplacian(kind, z, 2e-2));
        const double l2 = std::abs(fd_laplacian(kind, z, 1e-2));
        CHECK(l1 < 1e-3);
        CHECK(l2 < l1 / 3.0);
    }
}

TEST_CASE("free boundary: |grad u| = 1, H >= 0, curvature cross-checks") {
    for (auto kind : {SolutionKind::Plane, SolutionKind::DiskComplement, SolutionKind::Hairpin}) {
        for (int branch = 0; branch < branch_count(kind); ++branch) {
            for (int i = 0; i < 1000; ++i) {
                const double s = kind == SolutionKind::DiskComplement ? 2 * kPi * i / 1000.0 : -8.0 + 16.0 * i / 999.0;
                const BoundaryPoint bp = boundary_param(kind, branch, s);
                CHECK(bp.mean_curvature >= 0.0);
                CHECK(std::abs(dot(bp.normal, bp.tangent)) < 1e-12);
                const auto p = kind == SolutionKind::Hairpin
                                   ? evaluate_strip({s, branch == 0 ? kHalfPi : -kHalfPi})
                                   : evaluate(kind, bp.point);
                CHECK(std::abs(norm(p.grad) - 1.0) <= 1e-10);
                // ν = −∇u
                CHECK(norm(bp.normal + p.grad) < 1e-10);
            }
        }
    }
}

TEST_CASE("mean curvature agrees with the curve formula and with Re(-conj(G)^2 G')") {
    for (auto kind : {SolutionKind::DiskComplement, SolutionKind::Hairpin}) {
        for (int branch = 0; branch < branch_count(kind); ++branch) {
            for (double s : {-2.5, -0.8, 0.0, 0.3, 1.9, 3.0}) {
                const BoundaryPoint bp = boundary_param(kind, branch, s);
                // κ = |γ' × γ''| / |γ'|³ by central differences of the parametrization
                const double h = 1e-4;
                const Vec2 gm = boundary_param(kind, branch, s - h).point;
                const Vec2 gp = boundary_param(kind, branch, s + h).point;
                const Vec2 d1 = (gp - gm) * (0.5 / h);
                const Vec2 d2 = (gp + gm - bp.point * 2.0) * (1.0 / (h * h));
                const double kappa = std::abs(cross(d1, d2)) / std::pow(norm(d1), 3);
                CHECK(kappa == Approx(bp.mean_curvature).epsilon(1e-6));
                CHECK(norm(d1) == Approx(bp.arclen_density).epsilon(1e-7));

                const Complex g = conformal_g(kind, bp.point);
                const Complex gprime = conformal_g_derivative(kind, bp.point);
                const double h_conformal = (-std::conj(g) * std::conj(g) * gprime).real();
                CHECK(std::abs(h_conformal - bp.mean_curvature) < 1e-8);
            }
        }
    }
}

TEST_CASE("boundary parametrization examples") {
    const auto d = boundary_param(SolutionKind::DiskComplement, 0, 0.7);
    CHECK(d.point.x == Approx(std::cos(0.7)));
    CHECK(d.point.y == Approx(std::sin(0.7)));
    CHECK(d.mean_curvature == Approx(1.0));
    CHECK(d.arclen_density == Approx(1.0));

    const auto h = boundary_param(SolutionKind::Hairpin, 0, 1.3);
    CHECK(h.point.x == Approx(1.3));
    CHECK(h.point.y == Approx(kHalfPi + std::cosh(1.3)));
    CHECK(h.mean_curvature == Approx(1.0 / std::pow(std::cosh(1.3), 2)));
    CHECK(h.arclen_density == Approx(std::cosh(1.3)));
    CHECK(boundary_param(SolutionKind::Hairpin, 1, 1.3).point.y == Approx(-(kHalfPi + std::cosh(1.3))));

    const auto p = boundary_param(SolutionKind::Plane, 0, -2.0);
    CHECK(p.point == Vec2{0, -2});
    CHECK(p.mean_curvature == 0.0);

    CHECK_THROWS_AS(boundary_param(SolutionKind::DiskComplement, 1, 0.0), DomainError);
    CHECK_THROWS_AS(boundary_param(SolutionKind::Hairpin, 2, 0.0), DomainError);
    CHECK_THROWS_AS(boundary_param(SolutionKind::Plane, -1, 0.0), DomainError);
}

TEST_CASE("total curvature") {
    CHECK(total_curvature(SolutionKind::DiskComplement, 0, 0, 2 * kPi) == Approx(2 * kPi).epsilon(1e-12));
    CHECK(std::abs(total_curvature(SolutionKind::Hairpin, 0, -20, 20) - kPi) < 1e-6);
    for (double s : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(total_curvature(SolutionKind::Hairpin, 0, 0, s) == Approx(std::atan(std::sinh(s))).epsilon(1e-10));
        // turning-angle identity
        CHECK(total_curvature(SolutionKind::Hairpin, 1, -s, s / 2) ==
              Approx(std::abs(tangent_angle(SolutionKind::Hairpin, 1, s / 2) -
                              tangent_angle(SolutionKind::Hairpin, 1, -s)))
                  .epsilon(1e-10));
    }
    CHECK(total_curvature(SolutionKind::Plane, 0, -3, 3) == 0.0);
    CHECK_THROWS_AS(total_curvature(SolutionKind::Hairpin, 0, 1, 0), ArgumentError);
}

TEST_CASE("strip chart") {
    const auto a = strip_map({0, 0});
    CHECK(std::abs(a.z) == 0.0);
    CHECK(a.jacobian == Complex(2, 0));
    const auto b = strip_map({0, kHalfPi});
    CHECK(std::abs(b.z - Complex(0, kHalfPi + 1)) < 1e-15);
    const auto c = strip_map({1, kHalfPi});
    CHECK(std::abs(c.z - Complex(1, kHalfPi + std::cosh(1.0))) < 1e-14);
    CHECK_THROWS_AS(strip_map({0, kHalfPi + 1e-3}), DomainError);

    SUBCASE("u = Re cosh w >= 0, zero and |G| = 1 exactly on the edges") {
        for (int i = 0; i < 200; ++i) {
            const auto [a1, b1] = r2(i);
            const Complex w{10 * a1 - 5, (b1 - 0.5) * kPi};
            CHECK(evaluate_strip(w).u >= 0.0);
            CHECK(std::abs(conformal_g_strip(w)) <= 1.0 + 1e-15);
            const Complex edge{10 * a1 - 5, b1 < 0.5 ? -kHalfPi : kHalfPi};
            CHECK(std::abs(evaluate_strip(edge).u) < 1e-12);
            CHECK(std::abs(std::abs(conformal_g_strip(edge)) - 1.0) < 1e-14);
        }
    }
    SUBCASE("inverse, including points on the free boundary") {
        for (int branch = 0; branch < 2; ++branch) {
            for (int j = 0; j < 100; ++j) {
                const double s = -5.0 + 10.0 * j / 99.0;
                const Complex w{s, branch == 0 ? kHalfPi : -kHalfPi};
                const Complex back = strip_inverse(strip_map(w).z);
                CHECK(std::abs(back - w) < 1e-9);
            }
        }
        for (int i = 0; i < 300; ++i) {
            const auto [a1, b1] = r2(i);
            const Complex w{16 * a1 - 8, (b1 - 0.5) * kPi};
            CHECK(std::abs(strip_inverse(strip_map(w).z) - w) < 1e-9);
        }
    }
}

TEST_CASE("conformal map G and its inverse") {
    CHECK(std::abs(conformal_g(SolutionKind::DiskComplement, {2, 0}) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(conformal_g_strip({0, kHalfPi}) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(conformal_g(SolutionKind::Hairpin, {0, 0})) < 1e-15);
    CHECK_THROWS_AS(conformal_g(SolutionKind::Plane, {1, 0}), ArgumentError);

    const auto z = conformal_g_inverse(SolutionKind::DiskComplement, {0.5, 0});
    CHECK(z.point.x == Approx(2.0));
    const auto h = conformal_g_inverse(SolutionKind::Hairpin, {0, 1});
    REQUIRE(h.strip.has_value());
    CHECK(std::abs(*h.strip - Complex(0, kHalfPi)) < 1e-12);
    CHECK(h.point.y == Approx(kHalfPi + 1));
    CHECK(norm(conformal_g_inverse(SolutionKind::Hairpin, {0, 0}).point) < 1e-15);

    CHECK_THROWS_AS(conformal_g_inverse(SolutionKind::DiskComplement, {0, 0}), DomainError);
    CHECK_THROWS_AS(conformal_g_inverse(SolutionKind::Hairpin, {1, 0}), DomainError);
    CHECK_THROWS_AS(conformal_g_inverse(SolutionKind::Hairpin, {-1, 0}), DomainError);
    CHECK_THROWS_AS(conformal_g_inverse(SolutionKind::Hairpin, {0.9, 0.9}), DomainError);

    for (auto kind : {SolutionKind::DiskComplement, SolutionKind::Hairpin}) {
        for (int i = 0; i < 200; ++i) {
            const auto [a1, b1] = r2(i);
            const Complex zeta = std::polar(0.05 + 0.9 * a1, 2 * kPi * b1);
            const auto pre = conformal_g_inverse(kind, zeta);
            const Complex back = pre.strip ? conformal_g_strip(*pre.strip) : conformal_g(kind, pre.point);
            CHECK(std::abs(back - zeta) < 1e-12);
        }
    }
}

TEST_CASE("G' against a complex difference quotient") {
    for (Vec2 z : {Vec2{0.5, 0.3}, Vec2{-2.0, 2.5}, Vec2{6.0, -1.0}}) {
        const double h = 1e-5;
        const Complex dq = (conformal_g(SolutionKind::Hairpin, {z.x + h, z.y}) -
                            conformal_g(SolutionKind::Hairpin, {z.x - h, z.y})) /
                           (2 * h);
        CHECK(std::abs(dq - conformal_g_derivative(SolutionKind::Hairpin, z)) < 1e-8);
        // |D²u|² = 2|G'|²
        CHECK(evaluate(SolutionKind::Hairpin, z).hess_sq ==
              Approx(2 * std::norm(conformal_g_derivative(SolutionKind::Hairpin, z))).epsilon(1e-12));
    }
}

TEST_CASE("solution names round trip") {
    for (auto k : {SolutionKind::Plane, SolutionKind::DiskComplement, SolutionKind::Hairpin}) {
        CHECK(parse_solution_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_solution_kind("catenoid"), ArgumentError);
}
