#include "nhim/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "nhim/errors.hpp"

namespace nhim {

namespace {

constexpr int kNewtonIterations = 60;

std::string node_name(const char* what, double lambda, double fiber) {
    std::ostringstream os;
    os.precision(17);
    os << what << " node (lambda=" << lambda << ", fiber=" << fiber << ")";
    return os.str();
}

void require_planar(const MapModel& model, const DomainBox& box) {
    if (model.u() != 1 || model.s() != 1 || box.u != 1 || box.s != 1) {
        throw ConfigError("manifold construction supports u = s = 1 only");
    }
}

bool converged_step(double step, double scale) { return std::fabs(step) <= 1e-17 + 1e-15 * std::fabs(scale); }

bool inside(const Point& p, double R) {
    const double lim = R * (1.0 + 1e-9) + 1e-15;
    return std::fabs(p[1]) <= lim && std::fabs(p[2]) <= lim;
}

// Starting guess for a preimage of (lambda*, x*) near the fiber origin.
std::array<double, 2> preimage_seed(const MapModel& model, double lambda_t, double x_t) {
    Point o{{lambda_t, 0.0, 0.0}};
    Point img = model.lift_point(o);
    double shift = torus_delta(lambda_t, wrap_unit(img[0]));
    Eigen::MatrixXd j = model.jacobian(o);
    double xx = j(1, 1) != 0.0 ? j(1, 1) : 1.0;
    return {lambda_t - shift, (x_t - img[1]) / xx};
}

struct Preimage {
    double lambda;
    double x;
    Point image;
    double residual;
};

// theta with pi_(lambda,x) f(theta, w(theta)) = (lambda*, x*) by damped Newton.
Preimage graph_preimage(const MapModel& model, const GridGraph& g, double lambda_t, double x_t,
                        std::array<double, 2> seed) {
    double lam = seed[0];
    double x = seed[1];
    auto residual = [&](double l, double xv, Point& img) {
        img = model.lift_point(g.point(l, xv));
        return Eigen::Vector2d(torus_delta(lambda_t, wrap_unit(img[0])), img[1] - x_t);
    };
    Point img;
    Eigen::Vector2d r = residual(lam, x, img);
    for (int it = 0; it < kNewtonIterations; ++it) {
        if (r.cwiseAbs().maxCoeff() == 0.0) break;
        Eigen::MatrixXd J = model.jacobian(g.point(lam, x));
        auto s = g.slope(lam, x);
        Eigen::Matrix2d A;
        A << J(0, 0) + J(0, 2) * s[0], J(0, 1) + J(0, 2) * s[1], J(1, 0) + J(1, 2) * s[0], J(1, 1) + J(1, 2) * s[1];
        Eigen::Vector2d step = A.partialPivLu().solve(r);
        if (!step.allFinite()) break;
        double t = 1.0;
        Point trial_img;
        Eigen::Vector2d trial;
        do {
            trial = residual(lam - t * step[0], x - t * step[1], trial_img);
            if (trial.norm() <= r.norm()) break;
            t *= 0.5;
        } while (t > 1e-6);
        lam -= t * step[0];
        x -= t * step[1];
        r = trial;
        img = trial_img;
        if (converged_step(step[0], lam) && converged_step(step[1], x)) {
            return {lam, x, img, r.cwiseAbs().maxCoeff()};
        }
    }
    double res = r.cwiseAbs().maxCoeff();
    if (res <= 1e-13) return {lam, x, img, res};
    throw ManifoldError("Newton did not converge at " + node_name("W^cu", lambda_t, x_t));
}

}  // namespace

void GridSpec::validate() const {
    if (n_lambda < 2 || n_fiber < 2) throw ConfigError("manifold grids need at least 2 nodes per axis");
}

GridGraph::GridGraph(GraphKind kind, double R, const GridSpec& spec)
    : kind_(kind), R_(R), spec_(spec), values_(Eigen::MatrixXd::Zero(spec.n_lambda, spec.n_fiber)) {
    spec.validate();
    if (!(R > 0.0)) throw ConfigError("grid radius must be positive");
}

double GridGraph::fiber_node(int j) const { return -R_ + 2.0 * R_ * j / (spec_.n_fiber - 1); }

namespace {

struct Cell {
    int i0, i1, j0;
    double a, b;
};

Cell locate(double lambda, double fiber, int n_lambda, int n_fiber, double R) {
    double t = wrap_unit(lambda) * n_lambda;
    int i0 = static_cast<int>(std::floor(t));
    double a = t - i0;
    i0 %= n_lambda;
    double s = (fiber + R) / (2.0 * R) * (n_fiber - 1);
    int j0 = std::clamp(static_cast<int>(std::floor(s)), 0, n_fiber - 2);
    return {i0, (i0 + 1) % n_lambda, j0, a, s - j0};
}

}  // namespace

double GridGraph::operator()(double lambda, double fiber) const {
    Cell c = locate(lambda, fiber, spec_.n_lambda, spec_.n_fiber, R_);
    double v0 = values_(c.i0, c.j0) + c.b * (values_(c.i0, c.j0 + 1) - values_(c.i0, c.j0));
    double v1 = values_(c.i1, c.j0) + c.b * (values_(c.i1, c.j0 + 1) - values_(c.i1, c.j0));
    return v0 + c.a * (v1 - v0);
}

std::array<double, 2> GridGraph::slope(double lambda, double fiber) const {
    Cell c = locate(lambda, fiber, spec_.n_lambda, spec_.n_fiber, R_);
    double v0 = values_(c.i0, c.j0) + c.b * (values_(c.i0, c.j0 + 1) - values_(c.i0, c.j0));
    double v1 = values_(c.i1, c.j0) + c.b * (values_(c.i1, c.j0 + 1) - values_(c.i1, c.j0));
    double f0 = values_(c.i0, c.j0 + 1) - values_(c.i0, c.j0);
    double f1 = values_(c.i1, c.j0 + 1) - values_(c.i1, c.j0);
    double h = 2.0 * R_ / (spec_.n_fiber - 1);
    return {(v1 - v0) * spec_.n_lambda, (f0 + c.a * (f1 - f0)) / h};
}

Point GridGraph::point(double lambda, double fiber) const {
    double w = (*this)(lambda, fiber);
    if (kind_ == GraphKind::center_unstable) return Point{{lambda, fiber, w}};
    return Point{{lambda, w, fiber}};
}

double GridGraph::lipschitz_estimate() const {
    const double dl = 1.0 / spec_.n_lambda;
    const double df = 2.0 * R_ / (spec_.n_fiber - 1);
    double best = 0.0;
    for (int i = 0; i < spec_.n_lambda; ++i) {
        int i1 = (i + 1) % spec_.n_lambda;
        for (int j = 0; j < spec_.n_fiber; ++j) {
            best = std::max(best, std::fabs(values_(i1, j) - values_(i, j)) / dl);
            if (j + 1 < spec_.n_fiber) best = std::max(best, std::fabs(values_(i, j + 1) - values_(i, j)) / df);
        }
    }
    return best;
}

GridGraph iterate_wcu(const MapModel& model, const DomainBox& box, const GridSpec& grid, const WcuOptions& opts) {
    require_planar(model, box);
    GridGraph g(GraphKind::center_unstable, box.R, grid);
    const int nl = grid.n_lambda;
    const int nf = grid.n_fiber;
    Eigen::MatrixXd pre_l(nl, nf);
    Eigen::MatrixXd pre_x(nl, nf);
    for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nf; ++j) {
            auto s = preimage_seed(model, g.lambda_node(i), g.fiber_node(j));
            pre_l(i, j) = s[0];
            pre_x(i, j) = s[1];
        }
    }
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::MatrixXd next(nl, nf);
        double res = 0.0;
        for (int i = 0; i < nl; ++i) {
            for (int j = 0; j < nf; ++j) {
                Preimage p = graph_preimage(model, g, g.lambda_node(i), g.fiber_node(j), {pre_l(i, j), pre_x(i, j)});
                pre_l(i, j) = p.lambda;
                pre_x(i, j) = p.x;
                next(i, j) = p.image[2];
                res = std::max(res, p.residual);
            }
        }
        double dist = (next - g.values()).cwiseAbs().maxCoeff();
        for (int i = 0; i < nl; ++i) {
            for (int j = 0; j < nf; ++j) g.value(i, j) = next(i, j);
        }
        g.sup_distances.push_back(dist);
        g.iterations = it + 1;
        g.residual = res;
        if (dist <= opts.tol) break;
        if (dist < best) {
            best = dist;
            since_best = 0;
        } else if (++since_best >= opts.stall_iterations) {
            g.stalled = true;
            break;
        }
    }
    return g;
}

WcsResult solve_wcs(const MapModel& model, const DomainBox& box, const GridSpec& grid, int depth,
                    const WcsOptions& opts) {
    require_planar(model, box);
    if (depth < 1) throw ConfigError("W^cs depth must be at least 1");
    WcsResult out;
    out.graph = GridGraph(GraphKind::center_stable, box.R, grid);
    GridGraph& g = out.graph;
    const int nl = grid.n_lambda;
    const int nf = grid.n_fiber;
    if (opts.keep_history) out.history.assign(depth, Eigen::MatrixXd::Zero(nl, nf));
    std::vector<double> spacing(depth, 0.0);
    double worst = 0.0;

    for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nf; ++j) {
            const double lam = g.lambda_node(i);
            const double y = g.fiber_node(j);
            double x = 0.0;
            double prev = 0.0;
            double res = 0.0;
            for (int d = 1; d <= depth; ++d) {
                bool done = false;
                for (int it = 0; it < kNewtonIterations && !done; ++it) {
                    Point p{{lam, x, y}};
                    Eigen::Vector3d v(0.0, 1.0, 0.0);
                    for (int l = 0; l < d; ++l) {
                        v = model.jacobian(p) * v;
                        p = model.lift_point(p);
                    }
                    res = std::fabs(p[1]);
                    if (v[1] == 0.0) break;
                    double step = p[1] / v[1];
                    x -= step;
                    done = converged_step(step, x);
                }
                Point p{{lam, x, y}};
                for (int l = 1; l <= d; ++l) {
                    p = model.lift_point(p);
                    if (!inside(p, box.R)) {
                        throw ManifoldError("orbit leaves D at " + node_name("W^cs", lam, y) + " depth " +
                                            std::to_string(d));
                    }
                }
                res = std::fabs(p[1]);
                if (!done && res > opts.residual_tol) {
                    throw ManifoldError("Newton did not converge at " + node_name("W^cs", lam, y));
                }
                spacing[d - 1] = std::max(spacing[d - 1], std::fabs(x - prev));
                prev = x;
                if (opts.keep_history) out.history[d - 1](i, j) = x;
            }
            if (res > opts.residual_tol) {
                throw ManifoldError("residual above tolerance at " + node_name("W^cs", lam, y));
            }
            worst = std::max(worst, res);
            g.value(i, j) = x;
        }
    }
    g.sup_distances = spacing;
    g.iterations = depth;
    g.residual = worst;
    return out;
}

LambdaStarPoint find_lambda_star(const GridGraph& wcu, const GridGraph& wcs, double lambda, int max_iterations,
                                 double tol) {
    if (wcu.kind() != GraphKind::center_unstable || wcs.kind() != GraphKind::center_stable) {
        throw ConfigError("find_lambda_star needs a W^cu and a W^cs graph");
    }
    LambdaStarPoint p;
    p.lambda = wrap_unit(lambda);
    for (int it = 0; it < max_iterations; ++it) {
        double x = wcs(p.lambda, p.y);
        double y = wcu(p.lambda, x);
        double change = std::max(std::fabs(x - p.x), std::fabs(y - p.y));
        p.x = x;
        p.y = y;
        p.iterations = it + 1;
        if (change <= tol) break;
    }
    p.residual = std::max(std::fabs(wcs(p.lambda, p.y) - p.x), std::fabs(wcu(p.lambda, p.x) - p.y));
    if (p.residual > 1e-10) throw ManifoldError("Lambda* iteration did not converge at lambda=" + std::to_string(lambda));
    return p;
}

LambdaStarCurve lambda_star_curve(const MapModel& model, const GridGraph& wcu, const GridGraph& wcs, int n_nodes) {
    if (n_nodes < 1) throw ConfigError("Lambda* sample needs at least one node");
    LambdaStarCurve c;
    for (int i = 0; i < n_nodes; ++i) {
        LambdaStarPoint p = find_lambda_star(wcu, wcs, static_cast<double>(i) / n_nodes);
        Point img = model.eval_point(p.point());
        LambdaStarPoint q = find_lambda_star(wcu, wcs, img[0]);
        c.invariance_residual = std::max(c.invariance_residual, std::hypot(img[1] - q.x, img[2] - q.y));
        c.points.push_back(p);
    }
    return c;
}

std::vector<Point> lambda_star_orbit(const MapModel& model, const GridGraph& wcu, const GridGraph& wcs,
                                     double lambda0, int n) {
    std::vector<Point> orbit{find_lambda_star(wcu, wcs, lambda0).point()};
    for (int l = 0; l < n; ++l) {
        Point img = model.eval_point(orbit.back());
        orbit.push_back(find_lambda_star(wcu, wcs, img[0]).point());
    }
    return orbit;
}

Point FiberGraph::point(std::size_t k) const {
    const auto r = static_cast<Eigen::Index>(k);
    double lam = wrap_unit(values(r, 0));
    if (kind == FiberKind::unstable) return Point{{lam, nodes[k], values(r, 1)}};
    return Point{{lam, values(r, 1), nodes[k]}};
}

double FiberGraph::lipschitz_estimate() const {
    double best = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        double d = std::hypot(values(r + 1, 0) - values(r, 0), values(r + 1, 1) - values(r, 1));
        best = std::max(best, d / (nodes[k + 1] - nodes[k]));
    }
    return best;
}

double fiber_distance(const FiberGraph& a, const FiberGraph& b) {
    if (a.nodes.size() != b.nodes.size()) throw ShapeError("fibers sampled on different nodes");
    double best = 0.0;
    for (Eigen::Index k = 0; k < a.values.rows(); ++k) {
        double dl = torus_delta(a.values(k, 0), b.values(k, 0));
        best = std::max(best, std::hypot(dl, a.values(k, 1) - b.values(k, 1)));
    }
    return best;
}

namespace {

std::vector<double> fiber_nodes(double R, int n) {
    if (n < 2) throw ConfigError("fibers need at least 2 nodes");
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(-R + 2.0 * R * k / (n - 1));
    return out;
}

// Piecewise-linear interpolation with linear extension, returning value and slope.
std::pair<double, double> interp(const std::vector<double>& nodes, const Eigen::VectorXd& v, double s) {
    const std::size_t n = nodes.size();
    std::size_t k = 0;
    while (k + 2 < n && s > nodes[k + 1]) ++k;
    double h = nodes[k + 1] - nodes[k];
    double sl = (v[static_cast<Eigen::Index>(k + 1)] - v[static_cast<Eigen::Index>(k)]) / h;
    return {v[static_cast<Eigen::Index>(k)] + sl * (s - nodes[k]), sl};
}

}  // namespace

FiberGraph unstable_fiber(const MapModel& model, const GridGraph& wcu, double lambda, double x, int n, int n_nodes) {
    if (model.u() != 1 || model.s() != 1) throw ConfigError("manifold construction supports u = s = 1 only");
    if (wcu.kind() != GraphKind::center_unstable) throw ConfigError("unstable fibers need a W^cu graph");
    if (n < 0) throw ConfigError("fiber depth must be non-negative");
    const double R = wcu.R();
    FiberGraph fib;
    fib.kind = FiberKind::unstable;
    fib.base = wcu.point(wrap_unit(lambda), x);
    fib.depth = n;
    fib.nodes = fiber_nodes(R, n_nodes);

    // Backward orbit inside W^cu.
    std::vector<Point> orbit{fib.base};
    for (int k = 0; k < n; ++k) {
        const Point& z = orbit.back();
        Preimage p = graph_preimage(model, wcu, z[0], z[1], preimage_seed(model, z[0], z[1]));
        orbit.push_back(wcu.point(wrap_unit(p.lambda), p.x));
        if (!inside(orbit.back(), R)) throw ManifoldError("backward orbit leaves D");
    }
    std::reverse(orbit.begin(), orbit.end());

    Eigen::VectorXd lam = Eigen::VectorXd::Constant(n_nodes, orbit.front()[0]);
    Eigen::VectorXd yv = Eigen::VectorXd::Constant(n_nodes, orbit.front()[2]);
    double res = 0.0;
    for (int k = 0; k < n; ++k) {
        const Point& from = orbit[k];
        const double ref = orbit[k + 1][0];
        const double xx = model.jacobian(from)(1, 1);
        Eigen::VectorXd nl(n_nodes), ny(n_nodes);
        res = 0.0;
        for (int j = 0; j < n_nodes; ++j) {
            const double target = fib.nodes[j];
            double s = from[1] + (target - orbit[k + 1][1]) / xx;
            Point img;
            bool done = false;
            for (int it = 0; it < kNewtonIterations && !done; ++it) {
                auto [l, dl] = interp(fib.nodes, lam, s);
                auto [y, dy] = interp(fib.nodes, yv, s);
                Point p{{l, s, y}};
                img = model.lift_point(p);
                Eigen::MatrixXd J = model.jacobian(p);
                double der = J(1, 0) * dl + J(1, 1) + J(1, 2) * dy;
                double step = (img[1] - target) / der;
                s -= step;
                done = converged_step(step, s);
            }
            auto [l, dl] = interp(fib.nodes, lam, s);
            auto [y, dy] = interp(fib.nodes, yv, s);
            img = model.lift_point(Point{{l, s, y}});
            double r = std::fabs(img[1] - target);
            if (!done && r > 1e-12) throw ManifoldError("Newton did not converge at " + node_name("W^u fiber", ref, target));
            res = std::max(res, r);
            nl[j] = ref + torus_delta(ref, wrap_unit(img[0]));
            ny[j] = img[2];
        }
        lam = nl;
        yv = ny;
    }
    fib.values.resize(n_nodes, 2);
    for (int j = 0; j < n_nodes; ++j) {
        fib.values(j, 0) = fib.base[0] + torus_delta(fib.base[0], wrap_unit(lam[j]));
        fib.values(j, 1) = yv[j];
    }
    fib.residual = res;
    return fib;
}

FiberGraph stable_fiber(const MapModel& model, const GridGraph& wcs, double lambda, double y0, int n, int n_nodes) {
    if (model.u() != 1 || model.s() != 1) throw ConfigError("manifold construction supports u = s = 1 only");
    if (wcs.kind() != GraphKind::center_stable) throw ConfigError("stable fibers need a W^cs graph");
    if (n < 1) throw ConfigError("stable fiber depth must be at least 1");
    const double R = wcs.R();
    FiberGraph fib;
    fib.kind = FiberKind::stable;
    fib.base = wcs.point(wrap_unit(lambda), y0);
    fib.depth = n;
    fib.nodes = fiber_nodes(R, n_nodes);
    fib.values.resize(n_nodes, 2);

    Point zn = fib.base;
    for (int l = 0; l < n; ++l) zn = model.lift_point(zn);

    // Continue outward from the node nearest y0.
    int start = 0;
    for (int j = 1; j < n_nodes; ++j) {
        if (std::fabs(fib.nodes[j] - y0) < std::fabs(fib.nodes[start] - y0)) start = j;
    }
    std::vector<int> order{start};
    for (int j = start + 1; j < n_nodes; ++j) order.push_back(j);
    for (int j = start - 1; j >= 0; --j) order.push_back(j);

    double worst = 0.0;
    std::vector<Eigen::Vector2d> solved(n_nodes);
    for (int j : order) {
        const double y = fib.nodes[j];
        Eigen::Vector2d th(fib.base[0], fib.base[1]);
        if (j > start) th = solved[j - 1];
        if (j < start) th = solved[j + 1];
        auto eval = [&](const Eigen::Vector2d& t, Eigen::Matrix2d* A) {
            Point p{{t[0], t[1], y}};
            Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 2);
            V(0, 0) = 1.0;
            V(1, 1) = 1.0;
            for (int l = 0; l < n; ++l) {
                V = model.jacobian(p) * V;
                p = model.lift_point(p);
            }
            if (A) *A = V.topRows(2);
            return Eigen::Vector2d(torus_delta(wrap_unit(zn[0]), wrap_unit(p[0])), p[1] - zn[1]);
        };
        bool done = false;
        Eigen::Vector2d r;
        for (int it = 0; it < kNewtonIterations && !done; ++it) {
            Eigen::Matrix2d A;
            r = eval(th, &A);
            Eigen::Vector2d step = A.partialPivLu().solve(r);
            if (!step.allFinite()) break;
            th -= step;
            done = converged_step(step[0], th[0]) && converged_step(step[1], th[1]);
        }
        r = eval(th, nullptr);
        double res = r.cwiseAbs().maxCoeff();
        if (res > 1e-9) throw ManifoldError("Newton did not converge at " + node_name("W^s fiber", th[0], y));
        Point p{{th[0], th[1], y}};
        for (int l = 1; l < n; ++l) {
            p = model.lift_point(p);
            if (!inside(p, R)) throw ManifoldError("orbit leaves D at " + node_name("W^s fiber", th[0], y));
        }
        worst = std::max(worst, res);
        solved[j] = th;
        fib.values(j, 0) = fib.base[0] + torus_delta(fib.base[0], wrap_unit(th[0]));
        fib.values(j, 1) = th[1];
    }
    fib.residual = worst;
    return fib;
}

void write_csv(std::ostream& os, const std::string& model, const std::string& target, double L, double R,
               const std::vector<Point>& rows) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "L=%.17g R=%.17g", L, R);
    os << "# model=" << model << " target=" << target << ' ' << buf << '\n';
    os << "lambda,x,y\n";
    for (const auto& p : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p[0], p[1], p[2]);
        os << buf << '\n';
    }
}

std::vector<Point> graph_rows(const GridGraph& g) {
    std::vector<Point> rows;
    for (int i = 0; i < g.n_lambda(); ++i) {
        for (int j = 0; j < g.n_fiber(); ++j) rows.push_back(g.node_point(i, j));
    }
    return rows;
}

std::vector<Point> fiber_rows(const FiberGraph& f) {
    std::vector<Point> rows;
    for (std::size_t k = 0; k < f.nodes.size(); ++k) rows.push_back(f.point(k));
    return rows;
}

std::vector<Point> curve_rows(const LambdaStarCurve& c) {
    std::vector<Point> rows;
    for (const auto& p : c.points) rows.push_back(p.point());
    return rows;
}

}  // namespace nhim
