#pragma once

// Closed-form global solutions of the planar one-phase free boundary problem
//
//   u >= 0,  Δu = 0 in {u > 0},  |∇u| = 1 on ∂{u > 0},
//
// together with the geometry of their free boundaries.
//
//   Plane           u = max(x, 0)
//   DiskComplement  u = max(log|z|, 0)
//   Hairpin         u(Φ(w)) = Re cosh w on the strip |Im w| <= π/2, where
//                   Φ(w) = w + sinh w. The free boundary is the pair of
//                   catenaries y = ±(π/2 + cosh x).
//
// Every solution has the holomorphic Gauss map G = 2∂_z u = u_x - i u_y with
// |G| <= 1 in the positive phase and |G| = 1 on the free boundary. For the
// hairpin, G(Φ(w)) = tanh(w/2).

#include "fbindex/common.hpp"

#include <optional>
#include <string_view>

namespace fbindex {

enum class SolutionKind { Plane, DiskComplement, Hairpin };

std::string_view to_string(SolutionKind kind);
// Accepts "plane", "disk-complement", "hairpin".
SolutionKind parse_solution_kind(std::string_view name);

// Largest |Re w| admitted by the hairpin chart (cosh overflow guard).
inline constexpr double kMaxStripReal = 25.0;

struct PointValue {
    double u = 0.0;
    Vec2 grad;
    double hess_sq = 0.0;  // |D²u|² = 2|G'|²
};

// Evaluates u, ∇u and |D²u|² at a planar point of the closed positive
// phase. For the hairpin the strip coordinate is recovered by Newton.
PointValue evaluate(SolutionKind kind, Vec2 z);

// Hairpin evaluation in the strip coordinate w.
PointValue evaluate_strip(Complex w);

struct StripImage {
    Complex z;
    Complex jacobian;  // dz/dw = 1 + cosh w
};

// Φ(w) = w + sinh w on |Im w| <= π/2.
StripImage strip_map(Complex w);

// Inverse of Φ for z in the closed hairpin phase.
Complex strip_inverse(Complex z);

// True when z lies in the closed positive phase (up to `slack` in the
// defining inequality).
bool in_positive_phase(SolutionKind kind, Vec2 z, double slack = 1e-9);

// G at a planar point. Plane is rejected: the disk reduction is not used there.
Complex conformal_g(SolutionKind kind, Vec2 z);
// Hairpin G in strip coordinates, tanh(w/2).
Complex conformal_g_strip(Complex w);
// dG/dz at a planar point.
Complex conformal_g_derivative(SolutionKind kind, Vec2 z);
// dG/dz for the hairpin at strip coordinate w, sech⁴(w/2)/4.
Complex conformal_g_derivative_strip(Complex w);

struct ConformalPreimage {
    Vec2 point;
    std::optional<Complex> strip;  // set for the hairpin
};

// Inverse of G. Punctures (0 for DiskComplement, ±1 for Hairpin) and
// |ζ| > 1 are domain errors.
ConformalPreimage conformal_g_inverse(SolutionKind kind, Complex zeta);

struct BoundaryPoint {
    Vec2 point;
    Vec2 tangent;  // unit, in the direction of increasing parameter
    Vec2 normal;   // outward unit normal ν = -∇u
    double mean_curvature = 0.0;
    double arclen_density = 0.0;  // |γ'(s)|
};

// Number of free-boundary branches: 1 for Plane and DiskComplement, 2 for
// the hairpin (0 = upper catenary, 1 = lower).
int branch_count(SolutionKind kind);

// Free-boundary parametrizations:
//   Plane           γ(s) = (0, s)
//   DiskComplement  γ(s) = (cos s, sin s)
//   Hairpin         γ(s) = (s, ±(π/2 + cosh s))
BoundaryPoint boundary_param(SolutionKind kind, int branch, double s);

// ∫ H dℋ¹ over γ([s1, s2]) by adaptive quadrature.
double total_curvature(SolutionKind kind, int branch, double s1, double s2);

// Tangent angle of γ at s, continuous in s. Differences of this equal the
// total curvature of the arc between.
double tangent_angle(SolutionKind kind, int branch, double s);

}  // namespace fbindex
