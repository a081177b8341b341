#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhim/geometry.hpp"
#include "nhim/maps.hpp"

// Floating-point construction of the invariant objects. Only u = s = 1 is
// supported here.
namespace nhim {

// center_unstable: y = w(lambda, x). center_stable: x = w(lambda, y).
enum class GraphKind { center_unstable, center_stable };

struct GridSpec {
    int n_lambda = 256;
    int n_fiber = 17;
    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

// Graph over the periodic lambda axis times [-R, R], sampled on a uniform
// grid and interpolated piecewise linearly. Outside [-R, R] the edge cells
// are extended linearly.
class GridGraph {
public:
    GridGraph() = default;
    GridGraph(GraphKind kind, double R, const GridSpec& spec);

    GraphKind kind() const { return kind_; }
    int n_lambda() const { return spec_.n_lambda; }
    int n_fiber() const { return spec_.n_fiber; }
    double R() const { return R_; }
    double lambda_node(int i) const { return static_cast<double>(i) / spec_.n_lambda; }
    double fiber_node(int j) const;

    double& value(int i, int j) { return values_(i, j); }
    double value(int i, int j) const { return values_(i, j); }
    const Eigen::MatrixXd& values() const { return values_; }

    double operator()(double lambda, double fiber) const;
    // Partial derivatives (d/dlambda, d/dfiber) of the interpolant.
    std::array<double, 2> slope(double lambda, double fiber) const;
    // The graph point above (lambda, fiber) as (lambda, x, y).
    Point point(double lambda, double fiber) const;
    Point node_point(int i, int j) const { return point(lambda_node(i), fiber_node(j)); }

    // Largest difference quotient between neighbouring nodes.
    double lipschitz_estimate() const;

    // sup over nodes of |b_{i+1} - b_i| per iteration (or per depth).
    std::vector<double> sup_distances;
    int iterations = 0;
    bool stalled = false;
    // Largest equation residual of the final node solves.
    double residual = 0.0;

private:
    GraphKind kind_ = GraphKind::center_unstable;
    double R_ = 0.0;
    GridSpec spec_;
    Eigen::MatrixXd values_;
};

struct WcuOptions {
    int max_iterations = 200;
    double tol = 1e-15;
    int stall_iterations = 50;
};

// Graph transform b_{i+1} = G(b_i) from b_0 = 0: every target node theta* is
// pulled back by a damped Newton solve of pi_(lambda,x) f(theta, b(theta)) = theta*.
GridGraph iterate_wcu(const MapModel& model, const DomainBox& box, const GridSpec& grid,
                      const WcuOptions& opts = {});

struct WcsOptions {
    double residual_tol = 1e-10;
    // Keep the graph of every depth 1..depth.
    bool keep_history = false;
};

struct WcsResult {
    GridGraph graph;
    // history[d - 1] holds the node values at depth d when requested.
    std::vector<Eigen::MatrixXd> history;
};

// Per node (lambda, y): x with pi_x f^depth(lambda, x, y) = 0 and the orbit
// inside D, continued in the depth from x = 0.
WcsResult solve_wcs(const MapModel& model, const DomainBox& box, const GridSpec& grid, int depth,
                    const WcsOptions& opts = {});

struct LambdaStarPoint {
    double lambda = 0.0;
    double x = 0.0;
    double y = 0.0;
    int iterations = 0;
    double residual = 0.0;
    Point point() const { return Point{{lambda, x, y}}; }
};

// Fixed point of (x, y) -> (w_cs(lambda, y), w_cu(lambda, x)).
LambdaStarPoint find_lambda_star(const GridGraph& wcu, const GridGraph& wcs, double lambda,
                                 int max_iterations = 200, double tol = 1e-15);

struct LambdaStarCurve {
    std::vector<LambdaStarPoint> points;
    // max |pi_(x,y) f(p) - chi(pi_lambda f(p))| over the sample.
    double invariance_residual = 0.0;
};

// Orbit of chi(lambda0) of length n + 1, each image projected back onto the
// intersection of the two graphs.
std::vector<Point> lambda_star_orbit(const MapModel& model, const GridGraph& wcu, const GridGraph& wcs,
                                     double lambda0, int n);

LambdaStarCurve lambda_star_curve(const MapModel& model, const GridGraph& wcu, const GridGraph& wcs, int n_nodes);

enum class FiberKind { unstable, stable };

// Unstable: graph over x of (lambda, y). Stable: graph over y of
// (lambda, x). Lambda values are kept on the lift nearest to the base point.
struct FiberGraph {
    FiberKind kind = FiberKind::unstable;
    Point base;
    int depth = 0;
    std::vector<double> nodes;
    // Column 0 lambda, column 1 the other fiber coordinate.
    Eigen::MatrixXd values;
    double residual = 0.0;

    Point point(std::size_t k) const;
    double lipschitz_estimate() const;
};

// sup over nodes of the distance between two fibers on the same nodes.
double fiber_distance(const FiberGraph& a, const FiberGraph& b);

// Backward orbit of z = (lambda, x, w_cu(lambda, x)) by preimages inside the
// graph, then n graph-transform steps of the flat disc (lambda_-n, ., y_-n).
FiberGraph unstable_fiber(const MapModel& model, const GridGraph& wcu, double lambda, double x, int n,
                          int n_nodes = 33);

// Per node y: theta(y) with pi_(lambda,x)(f^n(theta, y) - f^n(z)) = 0 for
// z = (lambda, w_cs(lambda, y0), y0).
FiberGraph stable_fiber(const MapModel& model, const GridGraph& wcs, double lambda, double y0, int n,
                        int n_nodes = 33);

// `# model=<name> target=<t> L=<L> R=<R>`, a `lambda,x,y` header, then rows
// with 17 significant digits.
void write_csv(std::ostream& os, const std::string& model, const std::string& target, double L, double R,
               const std::vector<Point>& rows);
std::vector<Point> graph_rows(const GridGraph& g);
std::vector<Point> fiber_rows(const FiberGraph& f);
std::vector<Point> curve_rows(const LambdaStarCurve& c);

}  // namespace nhim
