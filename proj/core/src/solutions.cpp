#include "fbindex/solutions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <string>

namespace fbindex {

namespace {

void require_strip(Complex w) {
    if (std::abs(w.imag()) > kHalfPi + 1e-12) {
        throw DomainError("strip coordinate outside |Im w| <= pi/2");
    }
    if (std::abs(w.real()) > kMaxStripReal) {
        throw DomainError("strip coordinate beyond |Re w| <= 25");
    }
}

void require_branch(SolutionKind kind, int branch) {
    if (branch < 0 || branch >= branch_count(kind)) {
        throw DomainError("invalid free-boundary branch " + std::to_string(branch) + " for " +
                          std::string(to_string(kind)));
    }
}

Vec2 grad_from_g(Complex g) { return {g.real(), -g.imag()}; }

Complex newton_strip(Complex z, Complex w) {
    for (int it = 0; it < 100; ++it) {
        const Complex f = w + std::sinh(w) - z;
        const Complex df = 1.0 + std::cosh(w);
        Complex step = f / df;
        // damp steps that would leave the strip
        while (std::abs((w - step).imag()) > kHalfPi + 1e-9 && std::abs(step) > 1e-15) {
            step *= 0.5;
        }
        w -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
}

}  // namespace

std::string_view to_string(SolutionKind kind) {
    switch (kind) {
        case SolutionKind::Plane: return "plane";
        case SolutionKind::DiskComplement: return "disk-complement";
        case SolutionKind::Hairpin: return "hairpin";
    }
    return "unknown";
}

SolutionKind parse_solution_kind(std::string_view name) {
    if (name == "plane") return SolutionKind::Plane;
    if (name == "disk-complement") return SolutionKind::DiskComplement;
    if (name == "hairpin") return SolutionKind::Hairpin;
    throw ArgumentError("unknown solution '" + std::string(name) + "'");
}

StripImage strip_map(Complex w) {
    require_strip(w);
    return {w + std::sinh(w), 1.0 + std::cosh(w)};
}

Complex strip_inverse(Complex z) {
    if (!in_positive_phase(SolutionKind::Hairpin, to_vec(z))) {
        throw DomainError("point outside the hairpin positive phase");
    }
    // asinh is the large-|z| asymptote and z/2 the small-|z| one; near the
    // free boundary Newton can stall against the strip edge, so a few starts
    // on horizontal lines (the boundary line itself is exact for boundary
    // points, whose abscissa is Re w) are tried as well.
    const double sign = z.imag() < 0.0 ? -1.0 : 1.0;
    const double s0 = std::asinh(z).real();
    const std::array<Complex, 6> starts{std::asinh(z),           z / 2.0,
                                        Complex(z.real(), sign * kHalfPi), Complex(s0, sign * kHalfPi),
                                        Complex(s0, sign * kHalfPi / 2.0), Complex(s0, 0.0)};
    Complex best{};
    double best_res = std::numeric_limits<double>::infinity();
    for (Complex w0 : starts) {
        w0 = {w0.real(), std::clamp(w0.imag(), -kHalfPi, kHalfPi)};
        const Complex w = newton_strip(z, w0);
        const double res = std::abs(w + std::sinh(w) - z) / (1.0 + std::abs(z));
        if (std::abs(w.imag()) <= kHalfPi + 1e-9 && res < best_res) {
            best = w;
            best_res = res;
        }
    }
    if (best_res > 1e-12) {
        throw NumericalError("strip chart inversion did not converge");
    }
    return {best.real(), std::clamp(best.imag(), -kHalfPi, kHalfPi)};
}

bool in_positive_phase(SolutionKind kind, Vec2 z, double slack) {
    switch (kind) {
        case SolutionKind::Plane: return z.x >= -slack;
        case SolutionKind::DiskComplement: return norm(z) >= 1.0 - slack;
        case SolutionKind::Hairpin:
            // the chart covers |Re w| <= 25, i.e. |x| <= 25 + sinh 25
            if (std::abs(z.x) > kMaxStripReal + std::sinh(kMaxStripReal)) return false;
            return std::abs(z.y) <= kHalfPi + std::cosh(z.x) + slack * (1.0 + std::cosh(z.x));
    }
    return false;
}

PointValue evaluate_strip(Complex w) {
    require_strip(w);
    const double u = std::cosh(w.real()) * std::cos(w.imag());
    const Complex g = conformal_g_strip(w);
    const Complex dg = conformal_g_derivative_strip(w);
    return {std::max(u, 0.0), grad_from_g(g), 2.0 * std::norm(dg)};
}

PointValue evaluate(SolutionKind kind, Vec2 z) {
    if (!in_positive_phase(kind, z)) {
        throw DomainError("point outside the closed positive phase of " + std::string(to_string(kind)));
    }
    switch (kind) {
        case SolutionKind::Plane: return {std::max(z.x, 0.0), {1.0, 0.0}, 0.0};
        case SolutionKind::DiskComplement: {
            const double r2 = z.x * z.x + z.y * z.y;
            return {std::max(0.5 * std::log(r2), 0.0), {z.x / r2, z.y / r2}, 2.0 / (r2 * r2)};
        }
        case SolutionKind::Hairpin: return evaluate_strip(strip_inverse(to_complex(z)));
    }
    throw DomainError("unknown solution kind");
}

Complex conformal_g_strip(Complex w) {
    require_strip(w);
    return std::tanh(w / 2.0);
}

Complex conformal_g_derivative_strip(Complex w) {
    require_strip(w);
    // dG/dz = (dG/dw) / (dz/dw) = (sech²(w/2)/2) / (2 cosh²(w/2))
    const Complex c = std::cosh(w / 2.0);
    const Complex c2 = c * c;
    return 0.25 / (c2 * c2);
}

Complex conformal_g(SolutionKind kind, Vec2 z) {
    switch (kind) {
        case SolutionKind::Plane: throw ArgumentError("conformal_g is not used for the plane solution");
        case SolutionKind::DiskComplement:
            if (!in_positive_phase(kind, z)) throw DomainError("point outside |z| >= 1");
            return 1.0 / to_complex(z);
        case SolutionKind::Hairpin: return conformal_g_strip(strip_inverse(to_complex(z)));
    }
    throw DomainError("unknown solution kind");
}

Complex conformal_g_derivative(SolutionKind kind, Vec2 z) {
    switch (kind) {
        case SolutionKind::Plane: return 0.0;
        case SolutionKind::DiskComplement: {
            if (!in_positive_phase(kind, z)) throw DomainError("point outside |z| >= 1");
            const Complex zc = to_complex(z);
            return -1.0 / (zc * zc);
        }
        case SolutionKind::Hairpin: return conformal_g_derivative_strip(strip_inverse(to_complex(z)));
    }
    throw DomainError("unknown solution kind");
}

ConformalPreimage conformal_g_inverse(SolutionKind kind, Complex zeta) {
    const double r = std::abs(zeta);
    if (r > 1.0 + 1e-12) throw DomainError("conformal_g_inverse: |zeta| > 1");
    switch (kind) {
        case SolutionKind::Plane: throw ArgumentError("conformal_g_inverse is not used for the plane solution");
        case SolutionKind::DiskComplement:
            if (r == 0.0) throw DomainError("zeta = 0 is the puncture of the disk-complement map");
            return {to_vec(1.0 / zeta), std::nullopt};
        case SolutionKind::Hairpin: {
            if (std::abs(zeta - 1.0) < 1e-14 || std::abs(zeta + 1.0) < 1e-14) {
                throw DomainError("zeta = +-1 are the punctures of the hairpin map");
            }
            // w = 2 artanh ζ = log((1 + ζ)/(1 - ζ)); principal log keeps |Im w| <= π/2.
            Complex w = std::log((1.0 + zeta) / (1.0 - zeta));
            w = {w.real(), std::clamp(w.imag(), -kHalfPi, kHalfPi)};
            return {to_vec(strip_map(w).z), w};
        }
    }
    throw DomainError("unknown solution kind");
}

int branch_count(SolutionKind kind) { return kind == SolutionKind::Hairpin ? 2 : 1; }

BoundaryPoint boundary_param(SolutionKind kind, int branch, double s) {
    require_branch(kind, branch);
    switch (kind) {
        case SolutionKind::Plane: return {{0.0, s}, {0.0, 1.0}, {-1.0, 0.0}, 0.0, 1.0};
        case SolutionKind::DiskComplement: {
            const double c = std::cos(s), sn = std::sin(s);
            return {{c, sn}, {-sn, c}, {-c, -sn}, 1.0, 1.0};
        }
        case SolutionKind::Hairpin: {
            if (std::abs(s) > kMaxStripReal) throw DomainError("hairpin boundary parameter beyond |s| <= 25");
            const double sign = branch == 0 ? 1.0 : -1.0;
            const double ch = std::cosh(s), sh = std::sinh(s);
            BoundaryPoint p;
            p.point = {s, sign * (kHalfPi + ch)};
            p.tangent = Vec2{1.0, sign * sh} * (1.0 / ch);
            p.normal = Vec2{-sh, sign} * (1.0 / ch);
            p.mean_curvature = 1.0 / (ch * ch);
            p.arclen_density = ch;
            return p;
        }
    }
    throw DomainError("unknown solution kind");
}

double tangent_angle(SolutionKind kind, int branch, double s) {
    require_branch(kind, branch);
    switch (kind) {
        case SolutionKind::Plane: return 0.0;
        case SolutionKind::DiskComplement: return s;
        case SolutionKind::Hairpin: return std::atan(std::sinh(s));
    }
    return 0.0;
}

double total_curvature(SolutionKind kind, int branch, double s1, double s2) {
    require_branch(kind, branch);
    if (s1 > s2) throw ArgumentError("total_curvature: s1 > s2");
    if (s1 == s2) return 0.0;
    auto integrand = [&](double s) {
        const BoundaryPoint p = boundary_param(kind, branch, s);
        return p.mean_curvature * p.arclen_density;
    };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, s1, s2, 20, 1e-13, &err);
}

}  // namespace fbindex
