#pragma once

// Mesh-free spectrum of the disk form
//
//   Q0(ψ, ψ) = ∫_D |∇ψ|² − ∫_∂D ψ²,
//
// whose eigenproblem is −Δψ = λψ in D, ∂_r ψ = ψ on ∂D. Separating
// ψ = R(r)·cos(kθ) gives R = I_k(x r) with λ = −x² or R = J_k(x r) with
// λ = x², and the boundary condition becomes the secular equation
//
//   x·B_k'(x) = B_k(x),   B = I or J.
//
// λ = 0 occurs only at k = 1 (ψ = r cos θ, r sin θ).

#include "fbindex/common.hpp"

#include <vector>

namespace fbindex {

inline constexpr int kBesselMaxOrder = 50;
inline constexpr double kBesselMaxArgument = 30.0;

// Modified Bessel function I_k(x) by its power series, 0 <= k <= 50, 0 <= x <= 30.
double bessel_i(int k, double x);
// Bessel function J_k(x) by its power series (accumulated in long double).
double bessel_j(int k, double x);
// I_k' = (I_{k-1} + I_{k+1})/2 with I_{-1} = I_1.
double bessel_i_derivative(int k, double x);
// J_k' = (J_{k-1} − J_{k+1})/2 with J_{-1} = −J_1.
double bessel_j_derivative(int k, double x);

// x·I_k'(x) − I_k(x)
double secular_i(int k, double x);
// x·J_k'(x) − J_k(x)
double secular_j(int k, double x);

enum class RadialProfile { ModifiedBesselI, BesselJ, Power };

struct DiskEigenvalue {
    int k = 0;  // angular mode
    double lambda = 0.0;
    double x = 0.0;  // √|λ|
    RadialProfile profile = RadialProfile::Power;
    int multiplicity = 1;  // 1 for k = 0, 2 for k >= 1 (cos and sin)
};

// All negative eigenvalues found by scanning k = 0..50 for roots of
// secular_i on (0, 30] (sign-change bracketing, bisection to 1e-12).
std::vector<DiskEigenvalue> negative_eigenvalues_q0();

// Nonnegative eigenvalues for modes k = 0..k_max, at most per_mode roots
// each, ascending within each mode. The k = 1 zero mode is reported
// analytically with x = 0.
std::vector<DiskEigenvalue> positive_eigenvalues_q0(int k_max, int per_mode);

// Smallest value of x·I_k'(x)/I_k(x) on a uniform grid of (0, 30]; for
// k >= 1 this stays >= 1, which excludes negative eigenvalues in mode k.
double min_log_derivative_ratio_i(int k, int samples = 3000);

// Harmonic function a + Σ_k r^k (c_k cos kθ + d_k sin kθ)/√π. c[0] and d[0]
// hold the k = 1 coefficients.
struct FourierHarmonic {
    double a = 0.0;
    std::vector<double> c;
    std::vector<double> d;

    double value(double r, double theta) const;
    // (∂_r, (1/r)∂_θ) components of the gradient in the polar frame.
    std::pair<double, double> gradient_polar(double r, double theta) const;
};

// Q0 of a finite Fourier harmonic: Σ_{k>=1} (k − 1)(c_k² + d_k²) − 2π a².
double q0_value(const FourierHarmonic& h);

}  // namespace fbindex
