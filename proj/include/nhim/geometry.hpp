#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nhim/interval_matrix.hpp"
#include "nhim/jets.hpp"

namespace nhim {

// Point of Lambda x R^u x R^s stored as (lambda, x_1..x_u, y_1..y_s). The
// base coordinate lives on R/Z.
using Point = Eigen::VectorXd;

// Representative of lambda in [0, 1).
double wrap_unit(double lambda);
// Signed displacement from `from` to `to` along the nearest lift, in
// (-1/2, 1/2]. A tie at exactly 1/2 resolves to +1/2.
double torus_delta(double from, double to);
double torus_distance(double a, double b);

// D = Lambda x B_u(R) x B_s(R) together with the cone slope constant L and
// chart radius R_Lambda.
struct DomainBox {
    double R = 0.01;
    double R_Lambda = 0.5;
    double L = 0.99;
    int u = 1;
    int s = 1;

    int dim() const { return 1 + u + s; }
    // Throws ConfigError unless R > 0, u, s >= 1 and L in (2R/R_Lambda, 1).
    void validate() const;

    std::vector<std::size_t> lambda_idx() const;
    std::vector<std::size_t> x_idx() const;
    std::vector<std::size_t> y_idx() const;
    std::vector<std::size_t> lambda_x_idx() const;
    std::vector<std::size_t> lambda_y_idx() const;

    // Interval hull of D with lambda in [0, 1].
    IntervalVector enclosure() const;
    bool contains(const Point& p) const;
};

enum class ConeKind { stable, unstable, center_stable, center_unstable };

struct ConeSpec {
    ConeKind kind = ConeKind::unstable;
    double slope = 1.0;
};

// Cone membership of p relative to center. Unstable: |(dl, dy)| <= M |dx|.
// Stable: |(dl, dx)| <= M |dy|. Center-stable: |dx| < M |(dl, dy)| or p = center.
// Center-unstable: |dy| < M |(dl, dx)| or p = center. dl is the torus
// displacement; throws ChartError when it exceeds R_Lambda.
bool in_cone(const Point& center, const ConeSpec& spec, const Point& p, const DomainBox& box);

// Cone of order m around the graph of a polynomial: with d = p - center split
// into base part b and graph part g, membership means
// |g - poly(b)| <= M |b|^(m+1).
struct PolyCone {
    Point center;
    std::vector<std::size_t> base_idx;
    std::vector<std::size_t> graph_idx;
    // One polynomial per graph coordinate, in the base variables.
    JetMap poly;
    double M = 1.0;
    int order = 0;
    double delta = std::numeric_limits<double>::infinity();
    // Treat coordinate 0 as the torus angle.
    bool periodic_first = false;

    // Split (x | lambda, y) for an unstable cone in D.
    static PolyCone unstable(const Point& center, JetMap poly, double M, int order, const DomainBox& box);
    // Split (y | lambda, x).
    static PolyCone stable(const Point& center, JetMap poly, double M, int order, const DomainBox& box);
};

// False for points outside the delta-ball.
bool in_poly_cone(const PolyCone& cone, const Point& p);

struct Subdivision {
    int n_lambda = 64;
    int n_x = 1;
    int n_y = 1;
    void validate() const;
    bool operator==(const Subdivision&) const = default;
};

struct SubBox {
    IntervalVector box;
    std::size_t lambda_slice = 0;
};

// Sub-boxes covering D: n_lambda slices [i/n, (i+1)/n] of the base, and each
// fiber coordinate of [-R, R] split into n_x (resp. n_y) pieces.
std::vector<SubBox> subdivide(const DomainBox& box, const Subdivision& sub);

// Indices of the lambda slices meeting the charts P(z) of all z in slice i,
// that is, slices within torus distance R_Lambda/2 of slice i.
std::vector<std::size_t> chart_slices(const DomainBox& box, int n_lambda, std::size_t i);

}  // namespace nhim
