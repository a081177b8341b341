#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhim/geometry.hpp"
#include "nhim/interval_matrix.hpp"
#include "nhim/jets.hpp"

namespace nhim {

using ParamMap = std::map<std::string, double>;

// A map f: D -> Lambda x R^u x R^s with closed-form derivative and jets.
// The base component of eval_enclosure / lift_point is returned on the real
// line (not wrapped), so lifts over a full period can be compared.
class MapModel {
public:
    virtual ~MapModel() = default;

    virtual std::string name() const = 0;
    virtual int u() const { return 1; }
    virtual int s() const { return 1; }
    int dim() const { return 1 + u() + s(); }

    // f(p) with lambda wrapped to [0, 1).
    Point eval_point(const Point& p) const;
    // f(p) on the lift through p[0].
    virtual Point lift_point(const Point& p) const = 0;
    virtual Eigen::MatrixXd jacobian(const Point& p) const = 0;
    // Enclosure of f over an interval box (base component on the lift).
    virtual IntervalVector eval_enclosure(const IntervalVector& box) const = 0;
    // Enclosure of {Df(z) : z in box}.
    virtual IntervalMatrix deriv_enclosure(const IntervalVector& box) const = 0;
    // Taylor jets of the components of f at p, in the displacement h = z - p.
    virtual JetMap jet(const Point& p, int order) const = 0;
    virtual bool invertible_hint() const = 0;
    // Parameters as recorded in certificates.
    virtual ParamMap params() const = 0;
};

// Closed-form hyperbolic fixed point of the planar Henon map
// (q1, q2) -> (1 + q2 - a q1^2, b q1). Throws DomainError when
// (1 - b)^2 + 4a < 0.
std::pair<double, double> henon_fixed_point(double a, double b);

struct HenonParams {
    double a = 0.68;
    double b = 0.1;
    double c = 0.0;
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    // Value of eps used by point evaluations, jets and manifold code.
    double eps_point = 0.0;
    // Entries (1,2) and (2,1) of the near-diagonalising change of coordinates
    // C = [[1,0,0],[0,1,c12],[0,c21,1]].
    double c12 = -0.3553203857;
    double c21 = 0.03553203857;
};

// Rotating Henon family
//   F(lambda, q1, q2) = (lambda + c + eps q1 cos 2 pi lambda,
//                        1 + q2 - a q1^2 + eps cos 2 pi lambda, b q1)
// in the coordinates p = C^{-1}(q - q*) centred at the fixed point of the
// uncoupled map.
class RotatingHenonModel : public MapModel {
public:
    explicit RotatingHenonModel(const HenonParams& params);

    std::string name() const override { return "rotating_henon"; }
    Point lift_point(const Point& p) const override;
    Eigen::MatrixXd jacobian(const Point& p) const override;
    IntervalVector eval_enclosure(const IntervalVector& box) const override;
    IntervalMatrix deriv_enclosure(const IntervalVector& box) const override;
    JetMap jet(const Point& p, int order) const override;
    bool invertible_hint() const override { return params_.b != 0.0; }
    ParamMap params() const override;

    const HenonParams& henon_params() const { return params_; }
    double q1_star() const { return q1s_; }
    double q2_star() const { return q2s_; }
    Interval eps() const { return Interval(params_.eps_lo, params_.eps_hi); }
    // The change of coordinates and an enclosure of its inverse.
    IntervalMatrix coordinate_change() const;
    IntervalMatrix coordinate_change_inverse() const { return c_inv_; }

private:
    HenonParams params_;
    double q1s_ = 0.0;
    double q2s_ = 0.0;
    IntervalMatrix c_inv_;
    Eigen::Matrix2d c_inv_point_;
};

struct MobiusParams {
    double xi = 3.0;
    double mu = 0.0;
    // Height of the strip used in the y-component.
    double R = 0.01;
};

// Doubling map of the base on a Moebius strip: in flat coordinates
//   (lambda, x, y) -> (2 lambda, xi x, sigma(lambda) (R (1/4 + cos(2 pi lambda)/4) + mu y))
// where sigma = -1 when 2 lambda wraps an odd number of times (the strip's
// identification (0, y) ~ (1, -y) applied to the image).
class MobiusModel : public MapModel {
public:
    explicit MobiusModel(const MobiusParams& params);

    std::string name() const override { return "mobius"; }
    Point lift_point(const Point& p) const override;
    Eigen::MatrixXd jacobian(const Point& p) const override;
    IntervalVector eval_enclosure(const IntervalVector& box) const override;
    IntervalMatrix deriv_enclosure(const IntervalVector& box) const override;
    JetMap jet(const Point& p, int order) const override;
    bool invertible_hint() const override { return false; }
    ParamMap params() const override;

private:
    MobiusParams params_;
};

struct LinearParams {
    double x_scale = 2.0;
    double y_scale = 0.5;
    double c = 0.0;
};

// Decoupled (lambda, x, y) -> (lambda + c, x_scale x, y_scale y).
class LinearTestModel : public MapModel {
public:
    explicit LinearTestModel(const LinearParams& params);

    std::string name() const override { return "linear_test"; }
    Point lift_point(const Point& p) const override;
    Eigen::MatrixXd jacobian(const Point& p) const override;
    IntervalVector eval_enclosure(const IntervalVector& box) const override;
    IntervalMatrix deriv_enclosure(const IntervalVector& box) const override;
    JetMap jet(const Point& p, int order) const override;
    bool invertible_hint() const override { return params_.x_scale != 0.0 && params_.y_scale != 0.0; }
    ParamMap params() const override;

private:
    LinearParams params_;
};

// Registry: "rotating_henon", "mobius", "linear_test". Unknown keys in the
// parameter map raise ConfigError.
std::unique_ptr<MapModel> make_model(const std::string& name, const ParamMap& params);
std::vector<std::string> model_names();

}  // namespace nhim
