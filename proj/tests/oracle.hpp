#pragma once

// Extended-precision reference values through MPFR. Each query returns the
// exact value rounded down and up at 256 bits, so a double interval passes
// when lo <= down and up <= hi.

#include <mpfr.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <utility>

namespace oracle {

class Real {
public:
    Real() { mpfr_init2(v_, 256); }
    explicit Real(double d) : Real() { mpfr_set_d(v_, d, MPFR_RNDN); }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;
    ~Real() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

// Is the exact value bracketed by [lo, hi]?
inline bool bracketed(double lo, double hi, const Real& down, const Real& up) {
    return mpfr_cmp_d(down.get(), lo) >= 0 && mpfr_cmp_d(up.get(), hi) <= 0;
}

enum class Op { add, sub, mul, div };

inline bool binary_inside(Op op, double x, double y, double lo, double hi) {
    Real a(x), b(y), d, u;
    for (auto [out, rnd] : {std::pair{&d, MPFR_RNDD}, std::pair{&u, MPFR_RNDU}}) {
        switch (op) {
            case Op::add: mpfr_add(out->get(), a.get(), b.get(), rnd); break;
            case Op::sub: mpfr_sub(out->get(), a.get(), b.get(), rnd); break;
            case Op::mul: mpfr_mul(out->get(), a.get(), b.get(), rnd); break;
            case Op::div: mpfr_div(out->get(), a.get(), b.get(), rnd); break;
        }
    }
    return bracketed(lo, hi, d, u);
}

enum class Fn { sin, cos, sqrt, sqr };

inline bool unary_inside(Fn fn, double x, double lo, double hi) {
    Real a(x), d, u;
    for (auto [out, rnd] : {std::pair{&d, MPFR_RNDD}, std::pair{&u, MPFR_RNDU}}) {
        switch (fn) {
            case Fn::sin: mpfr_sin(out->get(), a.get(), rnd); break;
            case Fn::cos: mpfr_cos(out->get(), a.get(), rnd); break;
            case Fn::sqrt: mpfr_sqrt(out->get(), a.get(), rnd); break;
            case Fn::sqr: mpfr_sqr(out->get(), a.get(), rnd); break;
        }
    }
    return bracketed(lo, hi, d, u);
}

inline bool pow_inside(double x, int n, double lo, double hi) {
    Real a(x), d, u;
    mpfr_pow_si(d.get(), a.get(), n, MPFR_RNDD);
    mpfr_pow_si(u.get(), a.get(), n, MPFR_RNDU);
    return bracketed(lo, hi, d, u);
}

// Exact dot product sum_k a_k b_k rounded both ways.
template <class A, class B>
bool dot_inside(const A& a, const B& b, int n, double lo, double hi) {
    Real acc, t, x, y;
    mpfr_set_zero(acc.get(), 1);
    for (int k = 0; k < n; ++k) {
        mpfr_set_d(x.get(), a(k), MPFR_RNDN);
        mpfr_set_d(y.get(), b(k), MPFR_RNDN);
        // 53 x 53 bits fit exactly into 256.
        mpfr_mul(t.get(), x.get(), y.get(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
    }
    return mpfr_cmp_d(acc.get(), lo) >= 0 && mpfr_cmp_d(acc.get(), hi) <= 0;
}

// Random double spread over many binades.
inline double wide_double(std::mt19937_64& rng, int min_exp = -30, int max_exp = 30) {
    std::uniform_real_distribution<double> mant(1.0, 2.0);
    std::uniform_int_distribution<int> ex(min_exp, max_exp);
    std::bernoulli_distribution neg(0.5);
    double v = std::ldexp(mant(rng), ex(rng));
    return neg(rng) ? -v : v;
}

}  // namespace oracle

namespace oracle {

// Does `inv` (an interval matrix with lo(i,j)/hi(i,j) accessors) contain the
// exact inverse of the 3x3 double matrix m? Cofactors are exact at 256 bits;
// only the final division rounds, in both directions.
template <class M, class I>
bool inverse3_inside(const M& m, const I& inv) {
    Real det, t, u;
    Real a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mpfr_set_d(a[i][j].get(), m(i, j), MPFR_RNDN);
    auto minor = [&](Real& out, int r0, int r1, int c0, int c1) {
        mpfr_mul(t.get(), a[r0][c0].get(), a[r1][c1].get(), MPFR_RNDN);
        mpfr_mul(u.get(), a[r0][c1].get(), a[r1][c0].get(), MPFR_RNDN);
        mpfr_sub(out.get(), t.get(), u.get(), MPFR_RNDN);
    };
    Real cof[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
            minor(cof[i][j], std::min(r0, r1), std::max(r0, r1), std::min(c0, c1), std::max(c0, c1));
            if ((i + j) % 2) mpfr_neg(cof[i][j].get(), cof[i][j].get(), MPFR_RNDN);
        }
    mpfr_set_zero(det.get(), 1);
    for (int j = 0; j < 3; ++j) {
        mpfr_mul(t.get(), a[0][j].get(), cof[0][j].get(), MPFR_RNDN);
        mpfr_add(det.get(), det.get(), t.get(), MPFR_RNDN);
    }
    Real d, up;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // inverse(i, j) = cof(j, i) / det
            mpfr_div(d.get(), cof[j][i].get(), det.get(), MPFR_RNDD);
            mpfr_div(up.get(), cof[j][i].get(), det.get(), MPFR_RNDU);
            if (!bracketed(inv(i, j).lo(), inv(i, j).hi(), d, up)) return false;
        }
    return true;
}

}  // namespace oracle
