#pragma once

// Desk-scale verification experiments. Each returns a finalized
// ExperimentReport (pass, runtime_ms filled in).

#include "fbindex/fem.hpp"
#include "fbindex/mesh.hpp"
#include "fbindex/report.hpp"
#include "fbindex/solutions.hpp"
#include "fbindex/spectra.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fbindex {

// Dense eigenvector checks (sign of φ₁, dense-vs-inertia agreement) run only
// up to this many free dofs.
inline constexpr int kQualitativeDenseCap = 1200;

// Truncated mesh of the given solution at mesh parameter h:
//   PLANE            plane_mesh(L, round(L/h))
//   DISK_COMPLEMENT  annulus 1 < r < R, n_r = ceil((R−1)/h), n_θ = ceil(2π/h)
//   HAIRPIN          strip cut |s| < S, n_s = 2·ceil(S/h), n_t = round(π/h)
TriMesh truncation_mesh(SolutionKind kind, double truncation, double h);

// λ₁ of the pencil (K, M) by spectrum slicing; the bracket is grown from
// [−1, 1] by doubling.
double lowest_eigenvalue(const AssembledForms& forms, double rel_tol = 1e-12);

// Discrete index per truncation, λ₁ per truncation, near-zero window
// count with δ = h², and (for small meshes) sign of φ₁.
ExperimentReport index_vs_truncation(SolutionKind kind, std::span<const double> truncations, double h,
                                     double zero_tol = kDefaultZeroTol);

struct CriticalRadiusOptions {
    int n_r = 64;
    int n_theta = 256;
    double lo = 2.5;
    double hi = 3.0;
    double target_width = 0.01;  // bisection stops below this
    double max_width = 0.02;     // acceptance width
};

// Bisection on the sign of λ₁ (inertia of K at zero shift) for the annulus
// 1 < r < R; the bracket must contain e.
ExperimentReport critical_radius_bracket(const CriticalRadiusOptions& options = {});

// Strictly nested truncations at fixed spacing h, truncation = step·h
// (annulus: R = 1 + step·h). Checks strict decrease of λ₁, λ_k(big) <=
// λ_k(small) for k <= 4, and sign-definiteness of φ₁ on every mesh.
ExperimentReport eigenvalue_monotonicity(SolutionKind kind, std::span<const int> steps, double h);

// A test function on the disk with its gradient (∂_ξ ψ + i ∂_η ψ).
// ψ vanishes within `clearance` of every puncture.
struct DiskTestFunction {
    std::string name;
    std::function<double(Complex)> value;
    std::function<Complex(Complex)> gradient;
    double clearance = 0.0;
    // Circles (center, radius) across which ψ is only finitely smooth;
    // quadrature panels are split there.
    std::vector<std::pair<Complex, double>> kinks;
};

// Punctures of G in the closed disk: {0} for DISK_COMPLEMENT, {±1} for HAIRPIN.
std::vector<Complex> disk_punctures(SolutionKind kind);

// (1 − |ζ−c|²/r²)⁴₊
DiskTestFunction bump_function(SolutionKind kind, Complex center, double radius);
// (1 − |ζ|²)² times a smooth cutoff vanishing within ε of the punctures.
DiskTestFunction quartic_bubble(SolutionKind kind, double eps);
// ψ ≡ 1 away from the punctures, smooth logarithmic cutoff between |ζ−p| = ε²
// and ε; Q0 → −2π as ε → 0.
DiskTestFunction log_cutoff(SolutionKind kind, double eps);
std::vector<DiskTestFunction> default_test_functions(SolutionKind kind);

struct QuadraticForms {
    double dirichlet = 0.0;
    double boundary = 0.0;
    double q() const { return dirichlet - boundary; }
};
// Q(φ, φ) with φ = ψ∘G, integrated over the physical domain through its chart
// (log-polar for DISK_COMPLEMENT, the strip for HAIRPIN).
QuadraticForms physical_form(SolutionKind kind, const DiskTestFunction& psi);
// Q0(ψ, ψ) by polar quadrature on the disk.
QuadraticForms disk_form(const DiskTestFunction& psi);

ExperimentReport conformal_equivalence(SolutionKind kind, const std::vector<DiskTestFunction>& test_functions);

// The piecewise logarithmic cutoff: 0 below ρ, linear to 1 at 2ρ, 1 up to R,
// 2 − log|x|/log R up to R², then 0.
double cutoff_phi(double r, double rho, double R);
double cutoff_dirichlet_energy(double rho, double R);  // by radial quadrature

ExperimentReport curvature_cutoff_bound(SolutionKind kind, double rho, std::span<const double> radii);

// ‖Tψ‖² on FREE edges against 2‖ψ‖‖∇ψ‖ + 10·h·‖ψ‖²_{H¹} for random P1 fields
// vanishing on DIRICHLET vertices (std::mt19937_64 with the given seed).
ExperimentReport trace_inequality(const TriMesh& mesh, const std::string& label, int n_samples, std::uint64_t seed);

struct JacobiCollar {
    SolutionKind kind = SolutionKind::Hairpin;
    double lo = 1.5;  // hairpin: strip cut s_lo; disk complement: inner radius
    double hi = 4.0;
    int n_1 = 40;     // n_s or n_r
    int n_2 = 16;     // n_t or n_θ
};
TriMesh collar_mesh(const JacobiCollar& collar);

// Solves −Δv = |D²u|² (Robin on FREE, v = 0 on cuts) and checks
// h = v + (|∇u|² + 1)/2 > 0. Throws StabilityViolation when λ₁ <= 0.
ExperimentReport jacobi_field_positivity(const JacobiCollar& collar);

// FEM index of Q0 on disk meshes and the oracle's negative eigenvalue count.
ExperimentReport disk_index(std::span<const int> n_rings);

// λ₁(Q0) error against the Bessel secular root over the given levels.
ExperimentReport fem_convergence(std::span<const int> n_rings);

// Least-squares slope of log(err) against log(h).
double fitted_slope(std::span<const double> h, std::span<const double> err);

}  // namespace fbindex
