#pragma once

// Directed rounding of scalar double operations without touching the FPU
// rounding mode. Each operation computes the round-to-nearest result, recovers
// the sign of the rounding error with an error-free transform (TwoSum, fma
// residual) and steps one ulp outward only when the result was inexact in the
// wrong direction. Near the underflow range the residual may itself be
// inexact, so the step is taken unconditionally there.

#include <cmath>
#include <limits>

namespace nhim::rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMax = std::numeric_limits<double>::max();
inline constexpr double kTiny = 0x1p-960;

inline double step_down(double x) { return std::nextafter(x, -kInf); }
inline double step_up(double x) { return std::nextafter(x, kInf); }

namespace detail {
// Sign of (exact a+b) - fl(a+b): -1, 0, +1.
inline int sum_error_sign(double a, double b, double s) {
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return (err > 0) - (err < 0);
}
inline double overflow_down(double r) { return r == kInf ? kMax : r; }
inline double overflow_up(double r) { return r == -kInf ? -kMax : r; }
}  // namespace detail

inline double add_down(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return std::isfinite(a) && std::isfinite(b) ? detail::overflow_down(s) : s;
    return detail::sum_error_sign(a, b, s) < 0 ? step_down(s) : s;
}

inline double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return std::isfinite(a) && std::isfinite(b) ? detail::overflow_up(s) : s;
    return detail::sum_error_sign(a, b, s) > 0 ? step_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
    if (a == 0 || b == 0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return std::isfinite(a) && std::isfinite(b) ? detail::overflow_down(p) : p;
    if (std::fabs(p) < kTiny) return step_down(p);
    double e = std::fma(a, b, -p);
    return e < 0 ? step_down(p) : p;
}

inline double mul_up(double a, double b) {
    if (a == 0 || b == 0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return std::isfinite(a) && std::isfinite(b) ? detail::overflow_up(p) : p;
    if (std::fabs(p) < kTiny) return step_up(p);
    double e = std::fma(a, b, -p);
    return e > 0 ? step_up(p) : p;
}

// b must be nonzero.
inline double div_down(double a, double b) {
    if (a == 0) return 0.0;
    double q = a / b;
    if (std::isinf(q)) return std::isfinite(a) ? detail::overflow_down(q) : q;
    if (std::isinf(b)) return q;
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return step_down(q);
    double r = std::fma(-q, b, a);  // exact: a - q*b
    if (r == 0) return q;
    bool exact_below = (r < 0) != (b < 0);
    return exact_below ? step_down(q) : q;
}

inline double div_up(double a, double b) {
    if (a == 0) return 0.0;
    double q = a / b;
    if (std::isinf(q)) return std::isfinite(a) ? detail::overflow_up(q) : q;
    if (std::isinf(b)) return q;
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return step_up(q);
    double r = std::fma(-q, b, a);
    if (r == 0) return q;
    bool exact_above = (r > 0) == (b > 0);
    return exact_above ? step_up(q) : q;
}

// a >= 0.
inline double sqrt_down(double a) {
    if (a <= 0) return 0.0;
    double s = std::sqrt(a);
    if (std::isinf(s)) return s;
    if (a < kTiny) return step_down(s);
    double r = std::fma(-s, s, a);
    return r < 0 ? step_down(s) : s;
}

inline double sqrt_up(double a) {
    if (a <= 0) return 0.0;
    double s = std::sqrt(a);
    if (std::isinf(s)) return s;
    if (a < kTiny) return step_up(s);
    double r = std::fma(-s, s, a);
    return r > 0 ? step_up(s) : s;
}

// a >= 0, n >= 0.
inline double pow_down(double a, unsigned n) {
    double result = 1.0, base = a;
    while (n) {
        if (n & 1u) result = mul_down(result, base);
        n >>= 1u;
        if (n) base = mul_down(base, base);
    }
    return result;
}

inline double pow_up(double a, unsigned n) {
    double result = 1.0, base = a;
    while (n) {
        if (n & 1u) result = mul_up(result, base);
        n >>= 1u;
        if (n) base = mul_up(base, base);
    }
    return result;
}

}  // namespace nhim::rounding
