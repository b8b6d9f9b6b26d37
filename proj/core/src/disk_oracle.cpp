#include "fbindex/disk_oracle.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace fbindex {

namespace {

constexpr double kScanStep = 0.01;

void require_range(int k, double x) {
    if (k < 0 || k > kBesselMaxOrder) throw DomainError("Bessel order outside [0, 50]: " + std::to_string(k));
    if (!(x >= 0.0) || x > kBesselMaxArgument) throw DomainError("Bessel argument outside [0, 30]");
}

// Σ_m sign^m (x/2)^{2m+k} / (m! (m+k)!); stops once a term falls below
// 1e-16 of the running magnitude sum.
long double bessel_series(int k, long double x, int sign) {
    if (x == 0.0L) return k == 0 ? 1.0L : 0.0L;
    const long double half = x / 2.0L;
    long double term = 1.0L;
    for (int i = 1; i <= k; ++i) term *= half / i;
    const long double q = half * half;
    long double sum = term, mag = std::abs(term);
    for (int m = 0; m < 500; ++m) {
        term *= sign * q / ((m + 1.0L) * (m + k + 1.0L));
        sum += term;
        mag += std::abs(term);
        if (std::abs(term) <= 1e-16L * mag && m > q) break;
    }
    return sum;
}

long double series_i(int k, long double x) { return bessel_series(std::abs(k), x, +1); }
long double series_j(int k, long double x) {
    const long double v = bessel_series(std::abs(k), x, -1);
    return (k < 0 && (k % 2 != 0)) ? -v : v;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
    double flo = f(lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Sign of x·J_k'(x) − J_k(x) as x → 0+ (leading series coefficient).
double secular_j_sign_at_zero(int k) { return k >= 2 ? 1.0 : -1.0; }

}  // namespace

double bessel_i(int k, double x) {
    require_range(k, x);
    return static_cast<double>(series_i(k, x));
}

double bessel_j(int k, double x) {
    require_range(k, x);
    return static_cast<double>(series_j(k, x));
}

double bessel_i_derivative(int k, double x) {
    require_range(k, x);
    return static_cast<double>(0.5L * (series_i(k - 1, x) + series_i(k + 1, x)));
}

double bessel_j_derivative(int k, double x) {
    require_range(k, x);
    return static_cast<double>(0.5L * (series_j(k - 1, x) - series_j(k + 1, x)));
}

double secular_i(int k, double x) {
    require_range(k, x);
    const long double lx = x;
    return static_cast<double>(lx * 0.5L * (series_i(k - 1, lx) + series_i(k + 1, lx)) - series_i(k, lx));
}

double secular_j(int k, double x) {
    require_range(k, x);
    const long double lx = x;
    return static_cast<double>(lx * 0.5L * (series_j(k - 1, lx) - series_j(k + 1, lx)) - series_j(k, lx));
}

std::vector<DiskEigenvalue> negative_eigenvalues_q0() {
    std::vector<DiskEigenvalue> out;
    const int n = static_cast<int>(std::lround(kBesselMaxArgument / kScanStep));
    for (int k = 0; k <= kBesselMaxOrder; ++k) {
        auto f = [k](double x) { return secular_i(k, x); };
        double prev_x = kScanStep, prev = f(prev_x);
        for (int j = 2; j <= n; ++j) {
            const double x = j * kScanStep;
            const double cur = f(x);
            if ((prev < 0.0) != (cur < 0.0)) {
                const double root = bisect(f, prev_x, x);
                out.push_back({k, -root * root, root, RadialProfile::ModifiedBesselI, k == 0 ? 1 : 2});
            }
            prev_x = x;
            prev = cur;
        }
    }
    return out;
}

std::vector<DiskEigenvalue> positive_eigenvalues_q0(int k_max, int per_mode) {
    if (k_max < 0 || k_max > kBesselMaxOrder) throw ArgumentError("positive_eigenvalues_q0: k_max outside [0, 50]");
    if (per_mode < 1) throw ArgumentError("positive_eigenvalues_q0: per_mode must be positive");
    std::vector<DiskEigenvalue> out;
    const int n = static_cast<int>(std::lround(kBesselMaxArgument / kScanStep));
    for (int k = 0; k <= k_max; ++k) {
        int found = 0;
        if (k == 1) {
            out.push_back({1, 0.0, 0.0, RadialProfile::Power, 2});
            ++found;
        }
        // extrema of J_k: 0 and the roots of J_k' on (0, 30]
        auto dj = [k](double x) { return bessel_j_derivative(k, x); };
        std::vector<double> ends{0.0};
        double px = kScanStep, pv = dj(px);
        for (int j = 2; j <= n && found < per_mode; ++j) {
            const double x = j * kScanStep;
            const double v = dj(x);
            if ((pv < 0.0) != (v < 0.0)) ends.push_back(bisect(dj, px, x));
            px = x;
            pv = v;
        }
        ends.push_back(kBesselMaxArgument);
        auto f = [k](double x) { return secular_j(k, x); };
        for (std::size_t i = 0; i + 1 < ends.size() && found < per_mode; ++i) {
            const double lo = ends[i], hi = ends[i + 1];
            const double flo = lo == 0.0 ? secular_j_sign_at_zero(k) : f(lo);
            const double fhi = f(hi);
            if ((flo < 0.0) == (fhi < 0.0)) continue;
            // keep the bracket off x = 0, where f vanishes for k >= 1
            double a = lo == 0.0 ? std::min(1e-3, 0.5 * hi) : lo;
            while (lo == 0.0 && ((f(a) < 0.0) != (flo < 0.0)) && a > 1e-12) a *= 0.5;
            const double root = bisect(f, a, hi);
            out.push_back({k, root * root, root, RadialProfile::BesselJ, k == 0 ? 1 : 2});
            ++found;
        }
    }
    return out;
}

double min_log_derivative_ratio_i(int k, int samples) {
    require_range(k, 0.0);
    double best = INFINITY;
    for (int j = 1; j <= samples; ++j) {
        const long double x = kBesselMaxArgument * j / samples;
        const long double ratio = x * 0.5L * (series_i(k - 1, x) + series_i(k + 1, x)) / series_i(k, x);
        best = std::min(best, static_cast<double>(ratio));
    }
    return best;
}

double FourierHarmonic::value(double r, double theta) const {
    double v = a;
    const double s = 1.0 / std::sqrt(kPi);
    for (std::size_t i = 0; i < std::max(c.size(), d.size()); ++i) {
        const int k = static_cast<int>(i) + 1;
        const double ck = i < c.size() ? c[i] : 0.0, dk = i < d.size() ? d[i] : 0.0;
        v += std::pow(r, k) * (ck * std::cos(k * theta) + dk * std::sin(k * theta)) * s;
    }
    return v;
}

std::pair<double, double> FourierHarmonic::gradient_polar(double r, double theta) const {
    double gr = 0.0, gt = 0.0;
    const double s = 1.0 / std::sqrt(kPi);
    for (std::size_t i = 0; i < std::max(c.size(), d.size()); ++i) {
        const int k = static_cast<int>(i) + 1;
        const double ck = i < c.size() ? c[i] : 0.0, dk = i < d.size() ? d[i] : 0.0;
        const double rk1 = k * std::pow(r, k - 1) * s;
        gr += rk1 * (ck * std::cos(k * theta) + dk * std::sin(k * theta));
        gt += rk1 * (-ck * std::sin(k * theta) + dk * std::cos(k * theta));
    }
    return {gr, gt};
}

double q0_value(const FourierHarmonic& h) {
    double q = -2.0 * kPi * h.a * h.a;
    for (std::size_t i = 0; i < std::max(h.c.size(), h.d.size()); ++i) {
        const double k = static_cast<double>(i) + 1.0;
        const double ck = i < h.c.size() ? h.c[i] : 0.0, dk = i < h.d.size() ? h.d[i] : 0.0;
        q += (k - 1.0) * (ck * ck + dk * dk);
    }
    return q;
}

}  // namespace fbindex
