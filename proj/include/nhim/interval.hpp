#pragma once

#include <iosfwd>
#include <string>

#include "nhim/errors.hpp"

namespace nhim {

// Closed real interval [lo, hi] with outward-rounded arithmetic.
class Interval {
public:
    constexpr Interval() = default;
    // Degenerate interval {v}. Implicit so that generic formulas can mix
    // doubles and intervals.
    Interval(double v);  // NOLINT(google-explicit-constructor)
    Interval(double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    // Nearest double to the midpoint; always inside the interval.
    double mid() const;
    // Upper bound on max(mid - lo, hi - mid).
    double rad() const;
    // Upper bound on hi - lo.
    double width() const;
    // max |x| over the interval.
    double mag() const;
    // min |x| over the interval.
    double mig() const;

    bool contains(double v) const { return lo_ <= v && v <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool is_point() const { return lo_ == hi_; }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);

    friend bool operator==(const Interval& a, const Interval& b) = default;

private:
    // Bypasses validation for results already known to be ordered.
    struct Trusted {};
    Interval(double lo, double hi, Trusted) : lo_(lo), hi_(hi) {}

    double lo_ = 0.0;
    double hi_ = 0.0;

    friend Interval operator+(const Interval&, const Interval&);
    friend Interval operator-(const Interval&, const Interval&);
    friend Interval operator-(const Interval&);
    friend Interval operator*(const Interval&, const Interval&);
    friend Interval operator/(const Interval&, const Interval&);
    friend Interval hull(const Interval&, const Interval&);
    friend Interval sqr(const Interval&);
    friend Interval sqrt(const Interval&);
    friend Interval abs(const Interval&);
    friend Interval pow(const Interval&, int);
    friend Interval sin(const Interval&);
    friend Interval cos(const Interval&);
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
// Throws DomainError when 0 is in b.
Interval operator/(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
// Range of x^2; tighter than x*x when the interval straddles 0.
Interval sqr(const Interval& x);
// Throws DomainError when lo < 0.
Interval sqrt(const Interval& x);
Interval abs(const Interval& x);
// Integer power. Negative exponents need 0 outside x.
Interval pow(const Interval& x, int n);
Interval sin(const Interval& x);
Interval cos(const Interval& x);

// Enclosure of pi.
Interval pi_interval();
// Enclosure of 2*pi.
Interval two_pi_interval();

// Rigorous comparisons: true only when every pair of members satisfies it.
inline bool certainly_less(const Interval& a, const Interval& b) { return a.hi() < b.lo(); }
inline bool certainly_greater(const Interval& a, const Interval& b) { return a.lo() > b.hi(); }

std::ostream& operator<<(std::ostream& os, const Interval& x);
std::string to_string(const Interval& x);

}  // namespace nhim
