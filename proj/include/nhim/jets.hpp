#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace nhim {

namespace detail {
struct MonomialTable;
}

// Polynomial in n variables truncated at total degree m, with dense
// coefficients in graded order. Coefficients are plain Taylor coefficients:
// the coefficient of h^j is D^j f(p) / j!.
class TruncPoly {
public:
    TruncPoly() = default;
    TruncPoly(int nvars, int order);

    static TruncPoly constant(int nvars, int order, double value);
    // value + h_i
    static TruncPoly variable(int nvars, int order, int index, double value = 0.0);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    std::size_t size() const { return coeffs_.size(); }

    double coeff(const std::vector<int>& exponents) const;
    void set_coeff(const std::vector<int>& exponents, double value);
    double constant_term() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }
    void set_constant_term(double value) { coeffs_.at(0) = value; }

    // Raw access in graded order; exponents(k) gives the multi-index.
    double& operator[](std::size_t k) { return coeffs_[k]; }
    double operator[](std::size_t k) const { return coeffs_[k]; }
    const std::vector<int>& exponents(std::size_t k) const;
    int degree(std::size_t k) const;

    double eval(const std::vector<double>& h) const;
    // Largest |coefficient| among monomials of total degree d.
    double max_abs_of_degree(int d) const;

    TruncPoly& operator+=(const TruncPoly& o);
    TruncPoly& operator-=(const TruncPoly& o);
    TruncPoly& operator*=(const TruncPoly& o);
    TruncPoly& operator+=(double c);
    TruncPoly& operator-=(double c);
    TruncPoly& operator*=(double c);

private:
    void require_compatible(const TruncPoly& o) const;

    int nvars_ = 0;
    int order_ = 0;
    std::shared_ptr<const detail::MonomialTable> table_;
    std::vector<double> coeffs_;

    friend TruncPoly operator*(const TruncPoly&, const TruncPoly&);
    friend TruncPoly compose(const TruncPoly&, const std::vector<TruncPoly>&);
};

TruncPoly operator+(TruncPoly a, const TruncPoly& b);
TruncPoly operator-(TruncPoly a, const TruncPoly& b);
TruncPoly operator-(TruncPoly a);
TruncPoly operator*(const TruncPoly& a, const TruncPoly& b);
TruncPoly operator+(TruncPoly a, double c);
TruncPoly operator+(double c, TruncPoly a);
TruncPoly operator-(TruncPoly a, double c);
TruncPoly operator-(double c, const TruncPoly& a);
TruncPoly operator*(TruncPoly a, double c);
TruncPoly operator*(double c, TruncPoly a);

TruncPoly sqr(const TruncPoly& a);
TruncPoly sin(const TruncPoly& a);
TruncPoly cos(const TruncPoly& a);

// Vector-valued jet: one polynomial per component, all in the same variables.
using JetMap = std::vector<TruncPoly>;

// outer(inner_1, ..., inner_n). Every inner polynomial must have zero
// constant term.
TruncPoly compose(const TruncPoly& outer, const JetMap& inner);
JetMap compose(const JetMap& outer, const JetMap& inner);

JetMap identity_jet(int nvars, int order);
// Matrix of degree-one coefficients, one row per component.
Eigen::MatrixXd linear_part(const JetMap& p);
// Inverse of p through order m: compose(p, q) = id. Needs p(0) = 0 and an
// invertible linear part; throws SingularJetError otherwise.
JetMap tpoly_inverse(const JetMap& p);

// Copy of p with constant terms removed.
JetMap without_constants(JetMap p);
// sqrt(sum of squares) of all degree-d coefficients over the components.
double degree_norm(const JetMap& p, int d);

std::ostream& operator<<(std::ostream& os, const TruncPoly& p);

}  // namespace nhim
