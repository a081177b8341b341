#include "nhim/interval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nhim/rounding.hpp"

namespace nhim {

namespace r = rounding;

namespace {

constexpr double kPiLo = 0x1.921fb54442d18p+1;
constexpr double kPiHi = 0x1.921fb54442d19p+1;

// libm sin/cos are within one ulp; two steps outward cover that.
double widen_down(double v) { return r::step_down(r::step_down(v)); }
double widen_up(double v) { return r::step_up(r::step_up(v)); }

// Beyond this magnitude the spacing of doubles exceeds pi/2 and the
// critical-point search is meaningless.
constexpr double kTrigLimit = 0x1p50;

}  // namespace

Interval::Interval(double v) : lo_(v), hi_(v) {
    if (std::isnan(v)) throw DomainError("interval endpoint is NaN");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi)) throw DomainError("interval endpoint is NaN");
    if (lo > hi) throw DomainError("interval with lo > hi");
}

double Interval::mid() const {
    if (lo_ == hi_) return lo_;
    if (std::isinf(lo_) || std::isinf(hi_)) {
        if (std::isinf(lo_) && std::isinf(hi_)) return 0.0;
        return std::isinf(lo_) ? -r::kMax : r::kMax;
    }
    double m = 0.5 * lo_ + 0.5 * hi_;
    return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
    double m = mid();
    return std::max(r::sub_up(m, lo_), r::sub_up(hi_, m));
}

double Interval::width() const { return r::sub_up(hi_, lo_); }

double Interval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

double Interval::mig() const {
    if (contains_zero()) return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
}

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

Interval operator+(const Interval& a, const Interval& b) {
    return Interval(r::add_down(a.lo_, b.lo_), r::add_up(a.hi_, b.hi_));
}

Interval operator-(const Interval& a, const Interval& b) {
    return Interval(r::sub_down(a.lo_, b.hi_), r::sub_up(a.hi_, b.lo_));
}

Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_, Interval::Trusted{}); }

Interval operator*(const Interval& a, const Interval& b) {
    if ((a.lo_ == 0 && a.hi_ == 0) || (b.lo_ == 0 && b.hi_ == 0)) return Interval(0.0);
    double lo = std::min({r::mul_down(a.lo_, b.lo_), r::mul_down(a.lo_, b.hi_),
                          r::mul_down(a.hi_, b.lo_), r::mul_down(a.hi_, b.hi_)});
    double hi = std::max({r::mul_up(a.lo_, b.lo_), r::mul_up(a.lo_, b.hi_),
                          r::mul_up(a.hi_, b.lo_), r::mul_up(a.hi_, b.hi_)});
    return Interval(lo, hi);
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("division by an interval containing zero");
    double lo = std::min({r::div_down(a.lo_, b.lo_), r::div_down(a.lo_, b.hi_),
                          r::div_down(a.hi_, b.lo_), r::div_down(a.hi_, b.hi_)});
    double hi = std::max({r::div_up(a.lo_, b.lo_), r::div_up(a.lo_, b.hi_),
                          r::div_up(a.hi_, b.lo_), r::div_up(a.hi_, b.hi_)});
    return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_), Interval::Trusted{});
}

Interval sqr(const Interval& x) {
    double lo = x.mig();
    double hi = x.mag();
    return Interval(r::mul_down(lo, lo), r::mul_up(hi, hi));
}

Interval sqrt(const Interval& x) {
    if (x.lo_ < 0) throw DomainError("sqrt of an interval with negative lower endpoint");
    return Interval(r::sqrt_down(x.lo_), r::sqrt_up(x.hi_));
}

Interval abs(const Interval& x) { return Interval(x.mig(), x.mag(), Interval::Trusted{}); }

Interval pow(const Interval& x, int n) {
    if (n == 0) return Interval(1.0);
    if (n < 0) {
        if (x.contains_zero()) throw DomainError("negative power of an interval containing zero");
        return Interval(1.0) / pow(x, -n);
    }
    auto un = static_cast<unsigned>(n);
    if (n % 2 == 0) {
        double lo = x.mig();
        double hi = x.mag();
        return Interval(r::pow_down(lo, un), r::pow_up(hi, un));
    }
    // Odd powers are increasing; (-a)^n = -(a^n).
    auto down = [un](double v) { return v >= 0 ? r::pow_down(v, un) : -r::pow_up(-v, un); };
    auto up = [un](double v) { return v >= 0 ? r::pow_up(v, un) : -r::pow_down(-v, un); };
    return Interval(down(x.lo_), up(x.hi_));
}

Interval pi_interval() { return Interval(kPiLo, kPiHi); }

Interval two_pi_interval() { return Interval(2.0 * kPiLo, 2.0 * kPiHi); }

namespace {

// Range of a trig function given its values at the endpoints and a list of
// possibly enclosed critical points (offset + k*pi) whose values alternate
// between +1 (even k) and -1 (odd k).
Interval trig_range(const Interval& x, double (*fn)(double), double offset) {
    if (!std::isfinite(x.lo()) || !std::isfinite(x.hi()) || x.mag() > kTrigLimit) {
        return Interval(-1.0, 1.0);
    }
    if (x.width() >= 2.0 * kPiLo) return Interval(-1.0, 1.0);
    double f_lo = fn(x.lo());
    double f_hi = fn(x.hi());
    double lo = widen_down(std::min(f_lo, f_hi));
    double hi = widen_up(std::max(f_lo, f_hi));
    // Candidate k with (k + offset)*pi inside x; the range is padded by one on
    // each side and each candidate is tested with an interval multiple of pi.
    double k_first = std::floor(x.lo() / kPiLo - offset) - 1.0;
    double k_last = std::ceil(x.hi() / kPiLo - offset) + 1.0;
    Interval pi = pi_interval();
    for (double k = k_first; k <= k_last; k += 1.0) {
        Interval point = Interval(k + offset) * pi;
        if (point.hi() < x.lo() || point.lo() > x.hi()) continue;
        bool even = std::fmod(std::fabs(k), 2.0) == 0.0;
        if (even) {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    return Interval(std::max(lo, -1.0), std::min(hi, 1.0));
}

double sin_fn(double v) { return std::sin(v); }
double cos_fn(double v) { return std::cos(v); }

}  // namespace

// Critical points of cos are k*pi (max for even k); of sin, (k + 1/2)*pi
// (max for even k).
Interval cos(const Interval& x) { return trig_range(x, cos_fn, 0.0); }

Interval sin(const Interval& x) { return trig_range(x, sin_fn, 0.5); }

std::ostream& operator<<(std::ostream& os, const Interval& x) {
    std::ios_base::fmtflags flags = os.flags();
    std::streamsize prec = os.precision();
    os << std::setprecision(17) << '[' << x.lo() << ", " << x.hi() << ']';
    os.flags(flags);
    os.precision(prec);
    return os;
}

std::string to_string(const Interval& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace nhim
