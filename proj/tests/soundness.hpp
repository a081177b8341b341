#pragma once

// Randomised containment checks of the interval layer against the MPFR
// oracle. Each function returns the number of failed containments.

#include <array>
#include <cmath>
#include <random>

#include "nhim/interval.hpp"
#include "nhim/interval_matrix.hpp"
#include "oracle.hpp"

namespace nhim::soundness {

inline Interval random_interval(std::mt19937_64& rng, int min_exp = -30, int max_exp = 30) {
    double a = oracle::wide_double(rng, min_exp, max_exp);
    std::uniform_int_distribution<int> shape(0, 3);
    switch (shape(rng)) {
        case 0: return Interval(a);
        case 1: {
            double b = oracle::wide_double(rng, min_exp, max_exp);
            return Interval(std::min(a, b), std::max(a, b));
        }
        case 2: {
            double w = std::fabs(a) * std::ldexp(1.0, -std::uniform_int_distribution<int>(1, 40)(rng));
            return Interval(a, a + w);
        }
        default: {
            double b = std::fabs(oracle::wide_double(rng, min_exp, max_exp));
            return Interval(-std::fabs(a), b);
        }
    }
}

// Endpoints and one interior point.
inline std::array<double, 3> samples(std::mt19937_64& rng, const Interval& x) {
    std::uniform_real_distribution<double> t(0.0, 1.0);
    double m = x.lo() + t(rng) * (x.hi() - x.lo());
    if (!std::isfinite(m) || m < x.lo() || m > x.hi()) m = x.lo();
    return {x.lo(), x.hi(), m};
}

inline int binary(oracle::Op op, int cases) {
    std::mt19937_64 rng(static_cast<unsigned>(op) + 11);
    int failures = 0;
    for (int i = 0; i < cases; ++i) {
        Interval a = random_interval(rng), b = random_interval(rng);
        if (op == oracle::Op::div && b.contains_zero()) b = Interval(std::fabs(b.hi()) + 1e-3, std::fabs(b.hi()) + 2.0);
        Interval r = op == oracle::Op::add   ? a + b
                     : op == oracle::Op::sub ? a - b
                     : op == oracle::Op::mul ? a * b
                                             : a / b;
        for (double x : samples(rng, a))
            for (double y : samples(rng, b))
                if (!oracle::binary_inside(op, x, y, r.lo(), r.hi())) ++failures;
    }
    return failures;
}

inline int powers(int cases) {
    std::mt19937_64 rng(5);
    int failures = 0;
    for (int i = 0; i < cases; ++i) {
        Interval x = random_interval(rng, -20, 20);
        Interval q = sqr(x);
        Interval r = sqrt(abs(x));
        int n = std::uniform_int_distribution<int>(0, 7)(rng);
        Interval pw = pow(x, n);
        for (double v : samples(rng, x)) {
            if (!oracle::unary_inside(oracle::Fn::sqr, v, q.lo(), q.hi())) ++failures;
            if (!oracle::unary_inside(oracle::Fn::sqrt, std::fabs(v), r.lo(), r.hi())) ++failures;
            if (!oracle::pow_inside(v, n, pw.lo(), pw.hi())) ++failures;
        }
    }
    return failures;
}

inline int trig(int cases) {
    std::mt19937_64 rng(7);
    int failures = 0;
    for (int i = 0; i < cases; ++i) {
        Interval x = random_interval(rng, -12, 6);
        Interval s = sin(x), c = cos(x);
        if (s.lo() < -1.0 || s.hi() > 1.0 || c.lo() < -1.0 || c.hi() > 1.0) ++failures;
        for (double v : samples(rng, x)) {
            if (!oracle::unary_inside(oracle::Fn::sin, v, s.lo(), s.hi())) ++failures;
            if (!oracle::unary_inside(oracle::Fn::cos, v, c.lo(), c.hi())) ++failures;
        }
    }
    return failures;
}

// Well-conditioned (condition number below 100) random 3x3 matrices: the
// enclosure must contain the exact inverse and both products the identity.
inline int inverse_round_trip(int cases) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0, failures = 0;
    const Eigen::MatrixXd id = Eigen::Matrix3d::Identity();
    while (tested < cases) {
        Eigen::Matrix3d A = Eigen::Matrix3d::NullaryExpr([&] { return u(rng); });
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(A);
        if (svd.singularValues()(0) / svd.singularValues()(2) >= 100.0) continue;
        ++tested;
        IntervalMatrix IA(A);
        IntervalMatrix inv = inverse_enclosure(IA);
        if (!oracle::inverse3_inside(A, inv)) ++failures;
        if (!(IA * inv).contains(id)) ++failures;
        if (!(inv * IA).contains(id)) ++failures;
    }
    return failures;
}

}  // namespace nhim::soundness
