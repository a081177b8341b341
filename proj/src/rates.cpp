#include "nhim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nhim/errors.hpp"
#include "nhim/rounding.hpp"

namespace nhim {

namespace r = rounding;

namespace {

std::vector<std::size_t> range(std::size_t from, std::size_t count) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < count; ++i) idx.push_back(from + i);
    return idx;
}

std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

using Field = double BlockBounds::*;

// a + k*b rounded up.
double up_combo(double a, double k, double b) { return r::add_up(a, r::mul_up(k, b)); }
// m - k*n rounded down.
double down_combo(double m, double k, double n) { return r::sub_down(m, r::mul_up(k, n)); }

double sup_of(const EnclosureData& d, Field a, double k, Field b) {
    if (d.mode == ConstantsMode::hull || d.per_box.empty()) return up_combo(d.global.*a, k, d.global.*b);
    double best = -r::kInf;
    for (const auto& bb : d.per_box) best = std::max(best, up_combo(bb.*a, k, bb.*b));
    return best;
}

double inf_of(const EnclosureData& d, Field m, double k, Field n) {
    if (d.mode == ConstantsMode::hull || d.per_box.empty()) return down_combo(d.global.*m, k, d.global.*n);
    double best = r::kInf;
    for (const auto& bb : d.per_box) best = std::min(best, down_combo(bb.*m, k, bb.*n));
    return best;
}

double sup_field(const EnclosureData& d, Field f) {
    if (d.mode == ConstantsMode::hull || d.per_box.empty()) return d.global.*f;
    double best = 0.0;
    for (const auto& bb : d.per_box) best = std::max(best, bb.*f);
    return best;
}

}  // namespace

BlockBounds block_bounds(const IntervalMatrix& df, int u, int s) {
    const auto n = static_cast<std::size_t>(1 + u + s);
    if (df.rows() != n || df.cols() != n) throw ShapeError("derivative enclosure has the wrong shape");
    const std::vector<std::size_t> l{0};
    const auto x = range(1, static_cast<std::size_t>(u));
    const auto y = range(1 + static_cast<std::size_t>(u), static_cast<std::size_t>(s));
    const auto lx = concat(l, x);
    const auto ly = concat(l, y);
    BlockBounds b;
    b.y_y = op_norm_ub(df.sub_block(y, y));
    b.y_lx = op_norm_ub(df.sub_block(y, lx));
    b.lx_y = op_norm_ub(df.sub_block(lx, y));
    b.x_ly = op_norm_ub(df.sub_block(x, ly));
    b.ly_x = op_norm_ub(df.sub_block(ly, x));
    b.ly_ly = op_norm_ub(df.sub_block(ly, ly));
    b.m_x_x = m_lb(df.sub_block(x, x));
    b.m_lx_lx = m_lb(df.sub_block(lx, lx));
    return b;
}

EnclosureData collect_enclosures(const MapModel& model, const DomainBox& box, const Subdivision& sub,
                                 ConstantsMode mode) {
    if (model.u() != box.u || model.s() != box.s) throw ConfigError("model and domain dimensions differ");
    std::vector<SubBox> boxes = subdivide(box, sub);
    EnclosureData data;
    data.mode = mode;

    std::vector<IntervalMatrix> slice_hull(static_cast<std::size_t>(sub.n_lambda));
    std::vector<bool> slice_seen(slice_hull.size(), false);
    bool first = true;
    for (const auto& b : boxes) {
        IntervalMatrix df = model.deriv_enclosure(b.box);
        data.hull = first ? df : hull(data.hull, df);
        first = false;
        if (mode == ConstantsMode::per_box) data.per_box.push_back(block_bounds(df, box.u, box.s));
        auto& sh = slice_hull[b.lambda_slice];
        sh = slice_seen[b.lambda_slice] ? hull(sh, df) : df;
        slice_seen[b.lambda_slice] = true;
    }
    data.global = block_bounds(data.hull, box.u, box.s);

    const auto x = range(1, static_cast<std::size_t>(box.u));
    auto lx = concat({0}, x);
    data.m_x_x_chart = r::kInf;
    data.m_lx_lx_chart = r::kInf;
    for (std::size_t i = 0; i < slice_hull.size(); ++i) {
        auto members = chart_slices(box, sub.n_lambda, i);
        IntervalMatrix chart = slice_hull[members.front()];
        for (std::size_t j = 1; j < members.size(); ++j) chart = hull(chart, slice_hull[members[j]]);
        data.m_x_x_chart = std::min(data.m_x_x_chart, m_lb(chart.sub_block(x, x)));
        data.m_lx_lx_chart = std::min(data.m_lx_lx_chart, m_lb(chart.sub_block(lx, lx)));
    }
    return data;
}

RateConstants constants_from_data(const EnclosureData& d, double L) {
    if (!(L > 0.0)) throw ConfigError("L must be positive");
    const double inv_l = r::div_up(1.0, L);
    RateConstants c;
    c.L = L;
    c.mu_s1 = sup_of(d, &BlockBounds::y_y, inv_l, &BlockBounds::y_lx);
    c.mu_s2 = sup_of(d, &BlockBounds::y_y, L, &BlockBounds::lx_y);
    c.xi_u1 = inf_of(d, &BlockBounds::m_x_x, inv_l, &BlockBounds::x_ly);
    c.xi_u1P = down_combo(d.m_x_x_chart, inv_l, sup_field(d, &BlockBounds::x_ly));
    c.xi_u2 = inf_of(d, &BlockBounds::m_x_x, L, &BlockBounds::ly_x);
    c.mu_cs1 = sup_of(d, &BlockBounds::ly_ly, L, &BlockBounds::ly_x);
    c.mu_cs2 = sup_of(d, &BlockBounds::ly_ly, inv_l, &BlockBounds::x_ly);
    c.xi_cu1 = inf_of(d, &BlockBounds::m_lx_lx, L, &BlockBounds::lx_y);
    c.xi_cu1P = down_combo(d.m_lx_lx_chart, L, sup_field(d, &BlockBounds::lx_y));
    c.xi_cu2 = inf_of(d, &BlockBounds::m_lx_lx, inv_l, &BlockBounds::y_lx);
    // The chart-restricted bound never exceeds the true xi_u1 (resp. xi_cu1),
    // so a larger certified P-bound is also a valid bound for the latter.
    c.xi_u1 = std::max(c.xi_u1, c.xi_u1P);
    c.xi_cu1 = std::max(c.xi_cu1, c.xi_cu1P);
    return c;
}

RateConstants compute_constants(const MapModel& model, const DomainBox& box, const Subdivision& sub, double L,
                                ConstantsMode mode) {
    return constants_from_data(collect_enclosures(model, box, sub, mode), L);
}

RateConstants constants_from_enclosure(const IntervalMatrix& df, int u, int s, double L) {
    EnclosureData d;
    d.hull = df;
    d.global = block_bounds(df, u, s);
    d.m_x_x_chart = d.global.m_x_x;
    d.m_lx_lx_chart = d.global.m_lx_lx;
    return constants_from_data(d, L);
}

RateCheck check_rate_conditions(const RateConstants& c, int k) {
    if (k < 0) throw ConfigError("rate-condition order must be non-negative");
    auto fail = [](std::string tag) { return RateCheck{false, std::move(tag)}; };
    if (!(c.mu_s1 < 1.0)) return fail("mu_s1<1");
    if (!(1.0 < c.xi_u1P)) return fail("1<xi_u1P");
    if (!(c.mu_cs1 < c.xi_u1P)) return fail("mu_cs1<xi_u1P");
    if (!(c.mu_s1 < c.xi_cu1P)) return fail("mu_s1<xi_cu1P");
    if (k == 0) return {true, ""};

    const std::pair<const char*, double> xis[] = {{"xi_u1>0", c.xi_u1},   {"xi_u1P>0", c.xi_u1P},
                                                  {"xi_u2>0", c.xi_u2},   {"xi_cu1>0", c.xi_cu1},
                                                  {"xi_cu1P>0", c.xi_cu1P}, {"xi_cu2>0", c.xi_cu2}};
    for (const auto& [tag, v] : xis) {
        if (!(v > 0.0)) return fail(tag);
    }
    if (!(c.mu_cs2 < c.xi_u1)) return fail("mu_cs2<xi_u1");
    if (!(c.mu_s1 < c.xi_cu2)) return fail("mu_s1<xi_cu2");

    double mu_pow = c.mu_cs1;   // upper bound of mu_cs1^(j+1)
    double xi_pow = c.xi_cu1;   // lower bound of xi_cu1^(j+1)
    for (int j = 1; j <= k; ++j) {
        mu_pow = r::mul_up(mu_pow, c.mu_cs1);
        xi_pow = r::mul_down(xi_pow, c.xi_cu1);
        if (!(mu_pow < c.xi_u2)) return fail("mu_cs1^(j+1)<xi_u2 at j=" + std::to_string(j));
        if (!(c.mu_s2 < xi_pow)) return fail("mu_s2<xi_cu1^(j+1) at j=" + std::to_string(j));
    }
    return {true, ""};
}

namespace {

// Largest k with base^(k+1) < bound (base > 1), or with bound < base^(k+1)
// for base < 1; INT_MAX when every k qualifies.
long closed_form_limit(double base, double bound, bool growing) {
    constexpr long kAll = 1L << 30;
    if (growing) {
        if (base <= 1.0) return kAll;
        double ratio = std::log(bound) / std::log(base);  // need j + 1 < ratio
        if (!(ratio > 0.0)) return -1;
        return static_cast<long>(std::ceil(ratio)) - 2;
    }
    if (base >= 1.0) return kAll;
    if (!(bound > 0.0)) return kAll;
    double ratio = std::log(bound) / std::log(base);  // need j + 1 < ratio
    return static_cast<long>(std::ceil(ratio)) - 2;
}

}  // namespace

RateReport max_order(const RateConstants& rc, int k_cap) {
    if (k_cap < 0) throw ConfigError("k_cap must be non-negative");
    RateReport rep;
    rep.constants = rc;
    rep.k_cap = k_cap;
    RateCheck zero = check_rate_conditions(rc, 0);
    if (!zero.ok) {
        rep.order = -1;
        rep.binding_condition = zero.failing;
        return rep;
    }
    if (k_cap == 0) {
        rep.order = 0;
        rep.binding_condition = "k_cap";
        return rep;
    }
    RateCheck one = check_rate_conditions(rc, 1);
    if (!one.ok) {
        rep.order = 0;
        rep.binding_condition = one.failing;
        return rep;
    }
    long k = std::min(closed_form_limit(rc.mu_cs1, rc.xi_u2, true),
                      closed_form_limit(rc.xi_cu1, rc.mu_s2, false));
    k = std::clamp<long>(k, 1, k_cap);
    // The logarithms are only a starting point; the direct checks decide.
    while (k > 1 && !check_rate_conditions(rc, static_cast<int>(k)).ok) --k;
    while (k < k_cap && check_rate_conditions(rc, static_cast<int>(k + 1)).ok) ++k;
    rep.order = static_cast<int>(k);
    rep.binding_condition = k == k_cap ? "k_cap" : check_rate_conditions(rc, static_cast<int>(k + 1)).failing;
    return rep;
}

const char* to_string(LipschitzTarget t) {
    switch (t) {
        case LipschitzTarget::w_s_fiber: return "w_s_fiber";
        case LipschitzTarget::w_u_fiber: return "w_u_fiber";
        case LipschitzTarget::w_cu: return "w_cu";
        case LipschitzTarget::w_cs: return "w_cs";
    }
    return "unknown";
}

LipschitzTarget lipschitz_target_from_string(const std::string& name) {
    for (auto t : {LipschitzTarget::w_s_fiber, LipschitzTarget::w_u_fiber, LipschitzTarget::w_cu,
                   LipschitzTarget::w_cs}) {
        if (name == to_string(t)) return t;
    }
    throw ConfigError("unknown Lipschitz target '" + name + "'");
}

LipschitzSample lipschitz_sample(const EnclosureData& d, LipschitzTarget target, double M) {
    if (!(M > 0.0)) throw ConfigError("Lipschitz candidate M must be positive");
    const double inv_m = r::div_up(1.0, M);
    LipschitzSample smp;
    smp.M = M;
    switch (target) {
        case LipschitzTarget::w_s_fiber:
            smp.mu = sup_of(d, &BlockBounds::y_y, M, &BlockBounds::y_lx);
            smp.xi = down_combo(d.m_lx_lx_chart, inv_m, sup_field(d, &BlockBounds::lx_y));
            break;
        case LipschitzTarget::w_u_fiber:
            smp.xi = down_combo(d.m_x_x_chart, M, sup_field(d, &BlockBounds::x_ly));
            smp.mu = sup_of(d, &BlockBounds::ly_ly, inv_m, &BlockBounds::ly_x);
            break;
        case LipschitzTarget::w_cu:
            smp.xi = down_combo(d.m_lx_lx_chart, M, sup_field(d, &BlockBounds::lx_y));
            smp.mu = sup_of(d, &BlockBounds::y_y, inv_m, &BlockBounds::y_lx);
            break;
        case LipschitzTarget::w_cs:
            smp.xi = down_combo(d.m_x_x_chart, inv_m, sup_field(d, &BlockBounds::x_ly));
            smp.mu = sup_of(d, &BlockBounds::ly_ly, M, &BlockBounds::ly_x);
            break;
    }
    // xi / mu > 1 with mu >= 0.
    smp.certified = smp.xi > 0.0 && smp.mu >= 0.0 && smp.xi > smp.mu;
    return smp;
}

LipschitzResult lipschitz_bound_search(const EnclosureData& data, double L, LipschitzTarget target,
                                       const std::vector<double>& M_grid) {
    const bool fiber = target == LipschitzTarget::w_s_fiber || target == LipschitzTarget::w_u_fiber;
    const double upper = fiber ? 1.0 / L : L;
    LipschitzResult res;
    for (double M : M_grid) {
        if (!(M > 0.0 && M < upper)) {
            throw ConfigError(std::string("Lipschitz grid value outside the admissible range for ") + to_string(target));
        }
        LipschitzSample smp = lipschitz_sample(data, target, M);
        res.samples.push_back(smp);
        if (smp.certified && (!res.M || M < *res.M)) res.M = M;
    }
    return res;
}

LipschitzResult lipschitz_bound_search(const MapModel& model, const DomainBox& box, const Subdivision& sub,
                                       LipschitzTarget target, const std::vector<double>& M_grid) {
    return lipschitz_bound_search(collect_enclosures(model, box, sub), box.L, target, M_grid);
}

}  // namespace nhim
