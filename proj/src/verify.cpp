#include "nhim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "nhim/errors.hpp"
#include "nhim/rounding.hpp"

namespace nhim {

namespace r = rounding;

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::yes: return "true";
        case Verdict::no: return "false";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

// Upper bound of the Euclidean norm of the coordinates idx of v.
double norm_ub(const IntervalVector& v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s = r::add_up(s, r::mul_up(v[i].mag(), v[i].mag()));
    return r::sqrt_up(s);
}

double point_norm(const Point& p, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += p[static_cast<Eigen::Index>(i)] * p[static_cast<Eigen::Index>(i)];
    return std::sqrt(s);
}

// Corners and centre of an interval box.
std::vector<Point> sample_points(const IntervalVector& box) {
    const std::size_t n = box.size();
    std::vector<Point> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Point p(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) p[static_cast<Eigen::Index>(i)] = (mask >> i) & 1 ? box[i].hi() : box[i].lo();
        out.push_back(p);
    }
    Point c(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) c[static_cast<Eigen::Index>(i)] = box[i].mid();
    out.push_back(c);
    return out;
}

double smallest_singular_value(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues().minCoeff();
}

// f(c) + Df(box)(box - c), intersected with the natural enclosure. The
// coordinate change mixes x and y, so the natural enclosure alone suffers
// from dependency on thin faces.
IntervalVector image_enclosure(const MapModel& model, const IntervalVector& box) {
    IntervalVector centre(box.size());
    IntervalVector offset(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        centre[i] = Interval(box[i].mid());
        offset[i] = box[i] - centre[i];
    }
    IntervalVector mv = model.eval_enclosure(centre);
    IntervalVector lin = model.deriv_enclosure(box) * offset;
    IntervalVector natural = model.eval_enclosure(box);
    IntervalVector out(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        Interval m = mv[i] + lin[i];
        out[i] = Interval(std::max(m.lo(), natural[i].lo()), std::min(m.hi(), natural[i].hi()));
    }
    return out;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

CoveringResult check_covering(const MapModel& model, const DomainBox& box, const Subdivision& sub) {
    if (box.u != 1) throw ConfigError("covering check needs a one-dimensional unstable direction");
    if (model.u() != box.u || model.s() != box.s) throw ConfigError("model and domain dimensions differ");
    CoveringResult res;
    res.left_max = -r::kInf;
    res.right_min = r::kInf;
    res.m_x_lb = r::kInf;
    const auto y_idx = box.y_idx();
    const auto x_idx = box.x_idx();
    const double R = box.R;
    bool refuted = false;
    std::ostringstream why;

    for (const auto& b : subdivide(box, sub)) {
        IntervalVector img = image_enclosure(model, b.box);
        res.y_bound = std::max(res.y_bound, norm_ub(img, y_idx));
        IntervalMatrix df = model.deriv_enclosure(b.box);
        res.m_x_lb = std::min(res.m_x_lb, m_lb(df.sub_block(x_idx, x_idx)));
        if (!refuted) {
            for (const auto& p : sample_points(b.box)) {
                Point q = model.lift_point(p);
                if (point_norm(q, y_idx) >= R) {
                    refuted = true;
                    why << "point image leaves the stable ball; ";
                    break;
                }
                Eigen::MatrixXd j = model.jacobian(p);
                if (smallest_singular_value(j.block(1, 1, box.u, box.u)) == 0.0) {
                    refuted = true;
                    why << "df_x/dx singular at a sample point; ";
                    break;
                }
            }
        }
    }

    // Exit faces x = -R and x = R.
    Subdivision face_sub = sub;
    face_sub.n_x = 1;
    for (const auto& b : subdivide(box, face_sub)) {
        for (int side : {-1, 1}) {
            IntervalVector face = b.box;
            face[1] = Interval(side * R);
            Interval xi = image_enclosure(model, face)[1];
            if (side < 0) res.left_max = std::max(res.left_max, xi.hi());
            else res.right_min = std::min(res.right_min, xi.lo());
            if (refuted) continue;
            for (const auto& p : sample_points(face)) {
                double x = model.lift_point(p)[1];
                if ((side < 0 && x >= -R) || (side > 0 && x <= R)) {
                    refuted = true;
                    why << (side < 0 ? "left" : "right") << " exit face maps inside; ";
                    break;
                }
            }
        }
    }

    const bool y_ok = res.y_bound < R;
    const bool left_ok = res.left_max < -R;
    const bool right_ok = res.right_min > R;
    const bool m_ok = res.m_x_lb > 0.0;
    if (y_ok && left_ok && right_ok && m_ok) {
        res.verdict = Verdict::yes;
        res.detail = "all face and interior bounds hold";
        return res;
    }
    std::ostringstream fails;
    if (!y_ok) fails << "|pi_y f| bound " << res.y_bound << " >= R; ";
    if (!left_ok) fails << "left face bound " << res.left_max << " >= -R; ";
    if (!right_ok) fails << "right face bound " << res.right_min << " <= R; ";
    if (!m_ok) fails << "m(df_x/dx) not certified positive; ";
    std::string text = refuted ? why.str() + fails.str() : fails.str();
    res.detail = text.substr(0, text.size() - 2);
    res.verdict = refuted ? Verdict::no : Verdict::inconclusive;
    return res;
}

BackwardConeResult check_backward_cones(const MapModel& model, const DomainBox& box, const Subdivision& sub) {
    if (model.u() != box.u || model.s() != box.s) throw ConfigError("model and domain dimensions differ");
    BackwardConeResult res;
    const int n = box.dim();

    // Lift degree of the base map, read off at the fiber origin.
    IntervalVector start(static_cast<std::size_t>(n), Interval(0.0));
    IntervalVector end = start;
    end[0] = Interval(1.0);
    Interval shift = model.eval_enclosure(end)[0] - model.eval_enclosure(start)[0];
    double nearest = std::round(shift.mid());
    if (shift.lo() > nearest - 0.5 && shift.hi() < nearest + 0.5) res.lift_degree = static_cast<int>(nearest);

    IntervalMatrix df_hull;
    double dl_min = r::kInf;
    bool first = true;
    for (const auto& b : subdivide(box, sub)) {
        IntervalMatrix df = model.deriv_enclosure(b.box);
        dl_min = std::min(dl_min, df(0, 0).lo());
        df_hull = first ? df : hull(df_hull, df);
        first = false;
    }

    bool inverse_ok = true;
    try {
        IntervalMatrix inv = inverse_enclosure(df_hull);
        IntervalVector U(static_cast<std::size_t>(n), Interval(-2.0 * box.R, 2.0 * box.R));
        const double ext = r::div_up(2.0 * box.R, box.L);
        U[0] = Interval(-ext, ext);
        res.lambda_bound = (inv * U)[0].mag();
    } catch (const NotInvertibleError&) {
        inverse_ok = false;
        res.lambda_bound = r::kInf;
    }

    if (res.lift_degree != 1) {
        res.verdict = res.lift_degree == 0 ? Verdict::inconclusive : Verdict::no;
        res.detail = res.lift_degree == 0
                         ? "cannot certify: lift degree of the base map not determined"
                         : "cannot certify: base map has lift degree " + std::to_string(res.lift_degree) + " != 1";
        return res;
    }
    if (!(dl_min > 0.0)) {
        res.verdict = Verdict::inconclusive;
        res.detail = "cannot certify: d(pi_lambda f)/d lambda not certified positive";
        return res;
    }
    if (!inverse_ok) {
        res.verdict = Verdict::inconclusive;
        res.detail = "cannot certify (non-invertible enclosure)";
        return res;
    }
    if (res.lambda_bound < box.R_Lambda) {
        res.verdict = Verdict::yes;
        res.detail = "lambda displacement of preimages below R_Lambda";
    } else {
        res.verdict = Verdict::inconclusive;
        res.detail = "lambda displacement bound not below R_Lambda";
    }
    return res;
}

std::vector<double> default_lipschitz_grid(LipschitzTarget target, double L) {
    const bool fiber = target == LipschitzTarget::w_s_fiber || target == LipschitzTarget::w_u_fiber;
    const double upper = fiber ? 1.0 / L : L;
    std::vector<double> grid;
    constexpr int kPoints = 40;
    for (int i = 1; i <= kPoints; ++i) grid.push_back(upper * i / (kPoints + 1));
    return grid;
}

Certificate certify(const MapModel& model, const DomainBox& box, int k_requested, const Subdivision& sub,
                    int k_cap) {
    Certificate cert;
    cert.model = model.name();
    cert.params = model.params();
    cert.box = box;
    cert.sub = sub;
    cert.k_requested = k_requested;
    cert.rates.k_cap = k_cap;
    cert.generated_at = utc_timestamp();

    auto record = [&](const char* stage, const std::exception& e) {
        cert.errors.push_back(std::string(stage) + ": " + e.what());
    };

    bool rates_ok = false;
    try {
        box.validate();
        sub.validate();
        EnclosureData data = collect_enclosures(model, box, sub);
        cert.rates = max_order(constants_from_data(data, box.L), k_cap);
        rates_ok = true;
        for (auto t : {LipschitzTarget::w_s_fiber, LipschitzTarget::w_u_fiber, LipschitzTarget::w_cu,
                       LipschitzTarget::w_cs}) {
            cert.lipschitz.push_back({t, lipschitz_bound_search(data, box.L, t, default_lipschitz_grid(t, box.L)).M});
        }
    } catch (const std::exception& e) {
        record("rates", e);
    }
    try {
        cert.covering = check_covering(model, box, sub);
    } catch (const std::exception& e) {
        record("covering", e);
        cert.covering.detail = e.what();
    }
    try {
        cert.backward_cone = check_backward_cones(model, box, sub);
    } catch (const std::exception& e) {
        record("backward_cone", e);
        cert.backward_cone.detail = e.what();
    }
    cert.certified = cert.errors.empty() && rates_ok && cert.covering.verdict == Verdict::yes &&
                     cert.backward_cone.verdict == Verdict::yes && cert.rates.order >= k_requested;
    return cert;
}

nlohmann::ordered_json to_json(const Certificate& c, bool include_timestamp) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["model"] = c.model;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    j["params"] = params;
    j["L"] = c.box.L;
    j["R"] = c.box.R;
    j["R_Lambda"] = c.box.R_Lambda;
    j["subdivision"] = {{"n_lambda", c.sub.n_lambda}, {"n_x", c.sub.n_x}, {"n_y", c.sub.n_y}};
    j["covering"] = {{"verdict", to_string(c.covering.verdict)},
                     {"detail", c.covering.detail},
                     {"y_bound", c.covering.y_bound},
                     {"left_max", c.covering.left_max},
                     {"right_min", c.covering.right_min},
                     {"m_x_lb", c.covering.m_x_lb}};
    j["backward_cone"] = {{"verdict", to_string(c.backward_cone.verdict)},
                          {"lambda_bound", c.backward_cone.lambda_bound},
                          {"lift_degree", c.backward_cone.lift_degree},
                          {"detail", c.backward_cone.detail}};
    const RateConstants& k = c.rates.constants;
    j["rates"] = {{"mu_s1", k.mu_s1},
                  {"mu_s2", k.mu_s2},
                  {"xi_u1", k.xi_u1},
                  {"xi_u1P", k.xi_u1P},
                  {"xi_u2", k.xi_u2},
                  {"mu_cs1", k.mu_cs1},
                  {"mu_cs2", k.mu_cs2},
                  {"xi_cu1", k.xi_cu1},
                  {"xi_cu2", k.xi_cu2},
                  {"xi_cu1P", k.xi_cu1P},
                  {"order", c.rates.order},
                  {"binding_condition", c.rates.binding_condition},
                  {"k_cap", c.rates.k_cap},
                  {"k_requested", c.k_requested}};
    ordered_json lip = ordered_json::object();
    for (const auto& s : c.lipschitz) lip[to_string(s.target)] = s.M ? ordered_json(*s.M) : ordered_json(nullptr);
    j["lipschitz"] = lip;
    j["errors"] = c.errors;
    j["numerics"] = {{"interpolation", "piecewise linear in lambda and the fiber coordinate"}};
    j["certified"] = c.certified;
    j["version"] = c.version;
    if (include_timestamp) j["generated_at"] = c.generated_at;
    return j;
}

}  // namespace nhim
