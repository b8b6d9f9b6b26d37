#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fbindex {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Complex to_complex(Vec2 a) { return {a.x, a.y}; }
inline Vec2 to_vec(Complex z) { return {z.real(), z.imag()}; }

// Error taxonomy. The CLI maps these onto exit codes.

// Input lies outside the domain of a mathematical map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A caller-supplied parameter violates an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed mesh or report file. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Factorization breakdown or another failure of a numerical kernel.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The constrained second-variation operator is not positive definite on
// the requested subdomain, so the subdomain is not stable.
class StabilityViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace fbindex
