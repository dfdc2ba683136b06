#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace translum {

namespace detail {

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double dm = static_cast<double>(m);
        double aa = dm * (b - dm) * x / ((qam + 2.0 * dm) * (a + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + 2.0 * dm) * (qap + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/**
 * Exact one-sided Clopper-Pearson upper confidence bound on a binomial
 * proportion: the Beta(errors+1, bits-errors) quantile at `confidence`.
 * With zero errors this is 1 - (1-confidence)^(1/bits), about 3/bits at 95%.
 */
inline double ber_upper_bound(std::uint64_t errors, std::uint64_t bits, double confidence = 0.95) {
    if (bits == 0) throw std::invalid_argument("ber_upper_bound: bits must be > 0");
    if (errors > bits) throw std::invalid_argument("ber_upper_bound: errors exceed bits");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("ber_upper_bound: confidence must be in (0,1)");
    if (errors == bits) return 1.0;
    const double n = static_cast<double>(bits);
    if (errors == 0) return -std::expm1(std::log1p(-confidence) / n);

    const double a = static_cast<double>(errors) + 1.0;
    const double b = n - static_cast<double>(errors);
    double lo = static_cast<double>(errors) / n;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::incomplete_beta(a, b, mid) < confidence) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace translum
