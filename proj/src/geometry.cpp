#include "nhim/geometry.hpp"

#include <cmath>
#include <sstream>

#include "nhim/errors.hpp"

namespace nhim {

double wrap_unit(double lambda) {
    double w = lambda - std::floor(lambda);
    return w >= 1.0 ? 0.0 : w;
}

double torus_delta(double from, double to) {
    double d = wrap_unit(to - from);
    return d > 0.5 ? d - 1.0 : d;
}

double torus_distance(double a, double b) { return std::fabs(torus_delta(a, b)); }

void DomainBox::validate() const {
    std::ostringstream msg;
    if (!(R > 0.0)) msg << "R must be positive; ";
    if (!(R_Lambda > 0.0 && R_Lambda <= 0.5)) msg << "R_Lambda must lie in (0, 1/2]; ";
    if (u < 1 || s < 1) msg << "u and s must be at least 1; ";
    if (R > 0.0 && R_Lambda > 0.0 && !(L > 2.0 * R / R_Lambda && L < 1.0)) {
        msg << "L = " << L << " outside (2R/R_Lambda, 1) = (" << 2.0 * R / R_Lambda << ", 1); ";
    }
    std::string m = msg.str();
    if (!m.empty()) throw ConfigError("invalid domain: " + m.substr(0, m.size() - 2));
}

std::vector<std::size_t> DomainBox::lambda_idx() const { return {0}; }

std::vector<std::size_t> DomainBox::x_idx() const {
    std::vector<std::size_t> idx;
    for (int i = 0; i < u; ++i) idx.push_back(1 + i);
    return idx;
}

std::vector<std::size_t> DomainBox::y_idx() const {
    std::vector<std::size_t> idx;
    for (int i = 0; i < s; ++i) idx.push_back(1 + u + i);
    return idx;
}

std::vector<std::size_t> DomainBox::lambda_x_idx() const {
    std::vector<std::size_t> idx{0};
    for (auto i : x_idx()) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> DomainBox::lambda_y_idx() const {
    std::vector<std::size_t> idx{0};
    for (auto i : y_idx()) idx.push_back(i);
    return idx;
}

IntervalVector DomainBox::enclosure() const {
    IntervalVector b(dim(), Interval(-R, R));
    b[0] = Interval(0.0, 1.0);
    return b;
}

namespace {

double sub_norm(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += v[static_cast<Eigen::Index>(i)] * v[static_cast<Eigen::Index>(i)];
    return std::sqrt(s);
}

}  // namespace

bool DomainBox::contains(const Point& p) const {
    if (p.size() != dim()) return false;
    return sub_norm(p, x_idx()) <= R && sub_norm(p, y_idx()) <= R;
}

bool in_cone(const Point& center, const ConeSpec& spec, const Point& p, const DomainBox& box) {
    if (center.size() != box.dim() || p.size() != box.dim()) throw ShapeError("in_cone: point dimension mismatch");
    Eigen::VectorXd d = p - center;
    d[0] = torus_delta(center[0], p[0]);
    if (std::fabs(d[0]) > box.R_Lambda) throw ChartError("in_cone: points are not in a common chart");
    const double M = spec.slope;
    const bool same = d.cwiseAbs().maxCoeff() == 0.0;
    switch (spec.kind) {
        case ConeKind::unstable:
            return sub_norm(d, box.lambda_y_idx()) <= M * sub_norm(d, box.x_idx());
        case ConeKind::stable:
            return sub_norm(d, box.lambda_x_idx()) <= M * sub_norm(d, box.y_idx());
        case ConeKind::center_stable:
            return same || sub_norm(d, box.x_idx()) < M * sub_norm(d, box.lambda_y_idx());
        case ConeKind::center_unstable:
            return same || sub_norm(d, box.y_idx()) < M * sub_norm(d, box.lambda_x_idx());
    }
    return false;
}

PolyCone PolyCone::unstable(const Point& center, JetMap poly, double M, int order, const DomainBox& box) {
    PolyCone c;
    c.center = center;
    c.base_idx = box.x_idx();
    c.graph_idx = box.lambda_y_idx();
    c.poly = std::move(poly);
    c.M = M;
    c.order = order;
    c.periodic_first = true;
    return c;
}

PolyCone PolyCone::stable(const Point& center, JetMap poly, double M, int order, const DomainBox& box) {
    PolyCone c;
    c.center = center;
    c.base_idx = box.y_idx();
    c.graph_idx = box.lambda_x_idx();
    c.poly = std::move(poly);
    c.M = M;
    c.order = order;
    c.periodic_first = true;
    return c;
}

bool in_poly_cone(const PolyCone& cone, const Point& p) {
    if (p.size() != cone.center.size()) throw ShapeError("in_poly_cone: point dimension mismatch");
    Eigen::VectorXd d = p - cone.center;
    if (cone.periodic_first) d[0] = torus_delta(cone.center[0], p[0]);
    if (std::isfinite(cone.delta) && d.norm() > cone.delta) return false;
    std::vector<double> base;
    for (auto i : cone.base_idx) base.push_back(d[static_cast<Eigen::Index>(i)]);
    double residual = 0.0;
    for (std::size_t k = 0; k < cone.graph_idx.size(); ++k) {
        double g = d[static_cast<Eigen::Index>(cone.graph_idx[k])];
        if (k < cone.poly.size()) g -= cone.poly[k].eval(base);
        residual += g * g;
    }
    double b = 0.0;
    for (double v : base) b += v * v;
    return std::sqrt(residual) <= cone.M * std::pow(std::sqrt(b), cone.order + 1);
}

void Subdivision::validate() const {
    if (n_lambda < 1 || n_x < 1 || n_y < 1) throw ConfigError("subdivision counts must be at least 1");
}

std::vector<SubBox> subdivide(const DomainBox& box, const Subdivision& sub) {
    sub.validate();
    const int dim = box.dim();
    std::vector<int> counts(dim, sub.n_x);
    counts[0] = sub.n_lambda;
    for (int i = 1 + box.u; i < dim; ++i) counts[i] = sub.n_y;

    auto piece = [&](int coord, int j) {
        int n = counts[coord];
        if (coord == 0) return Interval(static_cast<double>(j) / n, static_cast<double>(j + 1) / n);
        return Interval(box.R * (2.0 * j - n) / n, box.R * (2.0 * (j + 1) - n) / n);
    };

    std::vector<SubBox> out;
    std::vector<int> idx(dim, 0);
    while (true) {
        SubBox b;
        b.box.reserve(dim);
        for (int c = 0; c < dim; ++c) b.box.push_back(piece(c, idx[c]));
        b.lambda_slice = static_cast<std::size_t>(idx[0]);
        out.push_back(std::move(b));
        int c = dim - 1;
        while (c >= 0 && ++idx[c] == counts[c]) idx[c--] = 0;
        if (c < 0) break;
    }
    return out;
}

std::vector<std::size_t> chart_slices(const DomainBox& box, int n_lambda, std::size_t i) {
    std::vector<std::size_t> out;
    const double reach = box.R_Lambda / 2.0 * n_lambda;
    for (int j = 0; j < n_lambda; ++j) {
        int diff = std::abs(static_cast<int>(i) - j);
        int steps = std::min(diff, n_lambda - diff);
        // Gap between the two slices, in units of the slice width.
        double gap = steps > 0 ? steps - 1.0 : 0.0;
        if (gap <= reach + 1e-9) out.push_back(static_cast<std::size_t>(j));
    }
    return out;
}

}  // namespace nhim
