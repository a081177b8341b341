#include "nhim/maps.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "nhim/errors.hpp"

namespace nhim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cos_2pi(double v) { return std::cos(kTwoPi * v); }
double sin_2pi(double v) { return std::sin(kTwoPi * v); }
Interval cos_2pi(const Interval& v) { return cos(two_pi_interval() * v); }
Interval sin_2pi(const Interval& v) { return sin(two_pi_interval() * v); }
TruncPoly cos_2pi(const TruncPoly& v) { return cos(v * kTwoPi); }

// Henon coefficients in scalar type S (double for point evaluation, Interval
// for enclosures).
template <class S>
struct HenonCoeffs {
    S a, b, c, two_pi;
    S q1s;
    S c12, c21;
    // C^{-1} restricted to the (q1, q2) plane.
    S ci11, ci12, ci21, ci22;
    // Fixed-point residuals 1 + q2* - a q1*^2 - q1* and b q1* - q2*, kept so
    // the map is evaluated around q* without cancellation.
    S r1, r2;
};

// The map in local coordinates. Differences from the fixed point are formed
// analytically so that small images keep their relative accuracy:
//   F1 - q1* = r1 + d2 - a d1 (2 q1* + d1) + eps cos,  F2 - q2* = r2 + b d1.
template <class T, class S, class E>
std::array<T, 3> henon_local(const T& lam, const T& x, const T& y, const E& eps, const HenonCoeffs<S>& k) {
    T d1 = x + k.c12 * y;
    T d2 = y + k.c21 * x;
    T cs = cos_2pi(lam);
    T base = lam + k.c + eps * (d1 + k.q1s) * cs;
    T e1 = d2 - k.a * d1 * (d1 + 2.0 * k.q1s) + eps * cs + k.r1;
    T e2 = k.b * d1 + k.r2;
    return {base, k.ci11 * e1 + k.ci12 * e2, k.ci21 * e1 + k.ci22 * e2};
}

template <class S>
using Mat3 = std::array<std::array<S, 3>, 3>;

// Df = C^{-1} DF C with DF the Jacobian of F at q = q* + C p.
template <class S, class E>
Mat3<S> henon_jacobian(const S& lam, const S& x, const S& y, const E& eps, const HenonCoeffs<S>& k) {
    S q1 = x + k.c12 * y + k.q1s;
    S cs = cos_2pi(lam);
    S sn = sin_2pi(lam);
    S zero(0.0);
    S one(1.0);
    Mat3<S> dF{{{one - k.two_pi * eps * q1 * sn, eps * cs, zero},
                {zero - k.two_pi * eps * sn, zero - 2.0 * k.a * q1, one},
                {zero, k.b, zero}}};
    // dF * C: columns 1 and 2 mix through c12, c21.
    Mat3<S> dFC;
    for (int i = 0; i < 3; ++i) {
        dFC[i][0] = dF[i][0];
        dFC[i][1] = dF[i][1] + dF[i][2] * k.c21;
        dFC[i][2] = dF[i][1] * k.c12 + dF[i][2];
    }
    Mat3<S> out;
    for (int j = 0; j < 3; ++j) {
        out[0][j] = dFC[0][j];
        out[1][j] = k.ci11 * dFC[1][j] + k.ci12 * dFC[2][j];
        out[2][j] = k.ci21 * dFC[1][j] + k.ci22 * dFC[2][j];
    }
    return out;
}

HenonCoeffs<double> point_coeffs(const HenonParams& p, double q1s, double q2s, const Eigen::Matrix2d& ci) {
    HenonCoeffs<double> k{};
    k.a = p.a;
    k.b = p.b;
    k.c = p.c;
    k.two_pi = kTwoPi;
    k.q1s = q1s;
    k.c12 = p.c12;
    k.c21 = p.c21;
    k.ci11 = ci(0, 0);
    k.ci12 = ci(0, 1);
    k.ci21 = ci(1, 0);
    k.ci22 = ci(1, 1);
    k.r1 = std::fma(-p.a * q1s, q1s, 1.0 + q2s - q1s);
    k.r2 = std::fma(p.b, q1s, -q2s);
    return k;
}

HenonCoeffs<Interval> interval_coeffs(const HenonParams& p, double q1s, double q2s, const IntervalMatrix& ci) {
    HenonCoeffs<Interval> k{};
    k.a = Interval(p.a);
    k.b = Interval(p.b);
    k.c = Interval(p.c);
    k.two_pi = two_pi_interval();
    k.q1s = Interval(q1s);
    k.c12 = Interval(p.c12);
    k.c21 = Interval(p.c21);
    k.ci11 = ci(0, 0);
    k.ci12 = ci(0, 1);
    k.ci21 = ci(1, 0);
    k.ci22 = ci(1, 1);
    Interval q1(q1s);
    k.r1 = Interval(1.0) + Interval(q2s) - k.a * q1 * q1 - q1;
    k.r2 = k.b * q1 - Interval(q2s);
    return k;
}

void require_box(const IntervalVector& box, int dim) {
    if (static_cast<int>(box.size()) != dim) throw ShapeError("box dimension does not match the model");
}

void require_point(const Point& p, int dim) {
    if (p.size() != dim) throw ShapeError("point dimension does not match the model");
}

}  // namespace

Point MapModel::eval_point(const Point& p) const {
    Point q = lift_point(p);
    q[0] = wrap_unit(q[0]);
    return q;
}

std::pair<double, double> henon_fixed_point(double a, double b) {
    double disc = (1.0 - b) * (1.0 - b) + 4.0 * a;
    if (disc < 0.0) throw DomainError("henon_fixed_point: negative discriminant");
    if (a == 0.0) throw DomainError("henon_fixed_point: a must be nonzero");
    double q1 = (-(1.0 - b) - std::sqrt(disc)) / (2.0 * a);
    return {q1, b * q1};
}

RotatingHenonModel::RotatingHenonModel(const HenonParams& params) : params_(params) {
    if (params.eps_lo > params.eps_hi) throw ConfigError("eps_lo must not exceed eps_hi");
    std::tie(q1s_, q2s_) = henon_fixed_point(params.a, params.b);
    Interval c12(params.c12);
    Interval c21(params.c21);
    Interval det = Interval(1.0) - c12 * c21;
    c_inv_ = IntervalMatrix(2, 2);
    c_inv_(0, 0) = Interval(1.0) / det;
    c_inv_(0, 1) = -c12 / det;
    c_inv_(1, 0) = -c21 / det;
    c_inv_(1, 1) = Interval(1.0) / det;
    c_inv_point_ = c_inv_.mid();
}

IntervalMatrix RotatingHenonModel::coordinate_change() const {
    IntervalMatrix c = IntervalMatrix::identity(3);
    c(1, 2) = Interval(params_.c12);
    c(2, 1) = Interval(params_.c21);
    return c;
}

Point RotatingHenonModel::lift_point(const Point& p) const {
    require_point(p, 3);
    auto k = point_coeffs(params_, q1s_, q2s_, c_inv_point_);
    auto r = henon_local(p[0], p[1], p[2], params_.eps_point, k);
    return Point{{r[0], r[1], r[2]}};
}

Eigen::MatrixXd RotatingHenonModel::jacobian(const Point& p) const {
    require_point(p, 3);
    auto k = point_coeffs(params_, q1s_, q2s_, c_inv_point_);
    auto j = henon_jacobian(p[0], p[1], p[2], params_.eps_point, k);
    Eigen::MatrixXd m(3, 3);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m(r, c) = j[r][c];
    }
    return m;
}

IntervalVector RotatingHenonModel::eval_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    auto k = interval_coeffs(params_, q1s_, q2s_, c_inv_);
    auto r = henon_local(box[0], box[1], box[2], eps(), k);
    return {r[0], r[1], r[2]};
}

IntervalMatrix RotatingHenonModel::deriv_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    auto k = interval_coeffs(params_, q1s_, q2s_, c_inv_);
    auto j = henon_jacobian(box[0], box[1], box[2], eps(), k);
    IntervalMatrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = j[r][c];
    }
    return m;
}

JetMap RotatingHenonModel::jet(const Point& p, int order) const {
    require_point(p, 3);
    auto k = point_coeffs(params_, q1s_, q2s_, c_inv_point_);
    TruncPoly lam = TruncPoly::variable(3, order, 0, p[0]);
    TruncPoly x = TruncPoly::variable(3, order, 1, p[1]);
    TruncPoly y = TruncPoly::variable(3, order, 2, p[2]);
    auto r = henon_local(lam, x, y, params_.eps_point, k);
    return {r[0], r[1], r[2]};
}

ParamMap RotatingHenonModel::params() const {
    return {{"a", params_.a},           {"b", params_.b},         {"c", params_.c},
            {"eps_lo", params_.eps_lo}, {"eps_hi", params_.eps_hi}, {"eps_point", params_.eps_point},
            {"c12", params_.c12},       {"c21", params_.c21}};
}

MobiusModel::MobiusModel(const MobiusParams& params) : params_(params) {}

namespace {

// (-1)^floor(2 lambda): the image wraps an odd number of times exactly when
// floor(2 lambda) is odd.
double mobius_sign(double lambda) {
    double k = std::floor(2.0 * lambda);
    return std::fmod(std::fabs(k), 2.0) == 0.0 ? 1.0 : -1.0;
}

}  // namespace

Point MobiusModel::lift_point(const Point& p) const {
    require_point(p, 3);
    double sigma = mobius_sign(p[0]);
    double y = sigma * (params_.R * (0.25 + 0.25 * cos_2pi(p[0])) + params_.mu * p[2]);
    return Point{{2.0 * p[0], params_.xi * p[1], y}};
}

Eigen::MatrixXd MobiusModel::jacobian(const Point& p) const {
    require_point(p, 3);
    double sigma = mobius_sign(p[0]);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 0) = 2.0;
    m(1, 1) = params_.xi;
    m(2, 0) = -sigma * params_.R * 0.25 * kTwoPi * sin_2pi(p[0]);
    m(2, 2) = sigma * params_.mu;
    return m;
}

namespace {

// Signs taken by (-1)^floor(2 lambda) over an interval.
std::vector<double> mobius_signs(const Interval& lam) {
    double k_lo = std::floor(2.0 * lam.lo());
    double k_hi = std::floor(2.0 * lam.hi());
    if (k_lo != k_hi) return {1.0, -1.0};
    return {mobius_sign(lam.lo())};
}

}  // namespace

IntervalVector MobiusModel::eval_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    Interval core = Interval(params_.R) * (Interval(0.25) + Interval(0.25) * cos_2pi(box[0])) +
                    Interval(params_.mu) * box[2];
    std::vector<double> signs = mobius_signs(box[0]);
    Interval y = Interval(signs[0]) * core;
    for (double s : signs) y = hull(y, Interval(s) * core);
    return {Interval(2.0) * box[0], Interval(params_.xi) * box[1], y};
}

IntervalMatrix MobiusModel::deriv_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    IntervalMatrix m(3, 3);
    m(0, 0) = Interval(2.0);
    m(1, 1) = Interval(params_.xi);
    Interval dl = Interval(-params_.R) * Interval(0.25) * two_pi_interval() * sin_2pi(box[0]);
    Interval dy(params_.mu);
    std::vector<double> signs = mobius_signs(box[0]);
    Interval row_l = Interval(signs[0]) * dl;
    Interval row_y = Interval(signs[0]) * dy;
    for (double s : signs) {
        row_l = hull(row_l, Interval(s) * dl);
        row_y = hull(row_y, Interval(s) * dy);
    }
    m(2, 0) = row_l;
    m(2, 2) = row_y;
    return m;
}

JetMap MobiusModel::jet(const Point& p, int order) const {
    require_point(p, 3);
    double sigma = mobius_sign(p[0]);
    TruncPoly lam = TruncPoly::variable(3, order, 0, p[0]);
    TruncPoly x = TruncPoly::variable(3, order, 1, p[1]);
    TruncPoly y = TruncPoly::variable(3, order, 2, p[2]);
    TruncPoly yy = ((cos_2pi(lam) * 0.25 + 0.25) * params_.R + y * params_.mu) * sigma;
    return {lam * 2.0, x * params_.xi, yy};
}

ParamMap MobiusModel::params() const { return {{"xi", params_.xi}, {"mu", params_.mu}, {"height", params_.R}}; }

LinearTestModel::LinearTestModel(const LinearParams& params) : params_(params) {}

Point LinearTestModel::lift_point(const Point& p) const {
    require_point(p, 3);
    return Point{{p[0] + params_.c, params_.x_scale * p[1], params_.y_scale * p[2]}};
}

Eigen::MatrixXd LinearTestModel::jacobian(const Point& p) const {
    require_point(p, 3);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = params_.x_scale;
    m(2, 2) = params_.y_scale;
    return m;
}

IntervalVector LinearTestModel::eval_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    return {box[0] + Interval(params_.c), Interval(params_.x_scale) * box[1], Interval(params_.y_scale) * box[2]};
}

IntervalMatrix LinearTestModel::deriv_enclosure(const IntervalVector& box) const {
    require_box(box, 3);
    return IntervalMatrix(jacobian(Point::Zero(3)));
}

JetMap LinearTestModel::jet(const Point& p, int order) const {
    require_point(p, 3);
    TruncPoly lam = TruncPoly::variable(3, order, 0, p[0]);
    TruncPoly x = TruncPoly::variable(3, order, 1, p[1]);
    TruncPoly y = TruncPoly::variable(3, order, 2, p[2]);
    return {lam + params_.c, x * params_.x_scale, y * params_.y_scale};
}

ParamMap LinearTestModel::params() const {
    return {{"x_scale", params_.x_scale}, {"y_scale", params_.y_scale}, {"c", params_.c}};
}

namespace {

double take(const ParamMap& params, const std::string& key, double fallback, std::set<std::string>& used) {
    used.insert(key);
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& model, const ParamMap& params, const std::set<std::string>& used) {
    for (const auto& [key, value] : params) {
        if (!used.count(key)) throw ConfigError("unknown parameter '" + key + "' for model " + model);
    }
}

}  // namespace

std::unique_ptr<MapModel> make_model(const std::string& name, const ParamMap& params) {
    std::set<std::string> used;
    if (name == "rotating_henon") {
        HenonParams p;
        p.a = take(params, "a", p.a, used);
        p.b = take(params, "b", p.b, used);
        p.c = take(params, "c", p.c, used);
        p.eps_lo = take(params, "eps_lo", 0.0, used);
        p.eps_hi = take(params, "eps_hi", p.eps_lo, used);
        p.eps_point = take(params, "eps_point", p.eps_hi, used);
        p.c12 = take(params, "c12", p.c12, used);
        p.c21 = take(params, "c21", p.c21, used);
        reject_unknown(name, params, used);
        return std::make_unique<RotatingHenonModel>(p);
    }
    if (name == "mobius") {
        MobiusParams p;
        p.xi = take(params, "xi", p.xi, used);
        p.mu = take(params, "mu", p.mu, used);
        p.R = take(params, "height", p.R, used);
        reject_unknown(name, params, used);
        return std::make_unique<MobiusModel>(p);
    }
    if (name == "linear_test") {
        LinearParams p;
        p.x_scale = take(params, "x_scale", p.x_scale, used);
        p.y_scale = take(params, "y_scale", p.y_scale, used);
        p.c = take(params, "c", p.c, used);
        reject_unknown(name, params, used);
        return std::make_unique<LinearTestModel>(p);
    }
    throw ConfigError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() { return {"rotating_henon", "mobius", "linear_test"}; }

}  // namespace nhim
