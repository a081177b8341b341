// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "jet_fit.hpp"
#include "nhim/commands.hpp"
#include "nhim/config.hpp"
#include "nhim/manifold.hpp"
#include "nhim/rates.hpp"
#include "nhim/transport.hpp"
#include "nhim/verify.hpp"
#include "properties.hpp"
#include "soundness.hpp"

using namespace nhim;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = NHIM_CONFIG_DIR;
constexpr double kL = 0.99;

struct Outcome {
    bool ok = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RateConstants published(int column) {
    RateConstants c;
    if (column == 0) {
        c.xi_u1 = c.xi_u1P = 2.81352;
        c.xi_u2 = 2.81408;
        c.xi_cu1 = c.xi_cu1P = 0.997718;
        c.xi_cu2 = 0.997766;
        c.mu_s1 = 0.0355597;
        c.mu_s2 = 0.0356074;
        c.mu_cs1 = 1.0014;
        c.mu_cs2 = 1.00196;
    } else {
        c.xi_u1 = c.xi_u1P = 2.7303;
        c.xi_u2 = 2.78624;
        c.xi_cu1 = c.xi_cu1P = 0.748463;
        c.xi_cu2 = 0.753236;
        c.mu_s1 = 0.0382945;
        c.mu_s2 = 0.0430675;
        c.mu_cs1 = 1.14097;
        c.mu_cs2 = 1.19691;
    }
    c.L = kL;
    return c;
}

const std::pair<const char*, double RateConstants::*> kFields[] = {
    {"xi_u1", &RateConstants::xi_u1},   {"xi_u1P", &RateConstants::xi_u1P}, {"xi_u2", &RateConstants::xi_u2},
    {"xi_cu1", &RateConstants::xi_cu1}, {"xi_cu2", &RateConstants::xi_cu2}, {"xi_cu1P", &RateConstants::xi_cu1P},
    {"mu_s1", &RateConstants::mu_s1},   {"mu_s2", &RateConstants::mu_s2},   {"mu_cs1", &RateConstants::mu_cs1},
    {"mu_cs2", &RateConstants::mu_cs2}};

double op2(const Eigen::MatrixXd& a) { return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0); }
double min_sv(const Eigen::MatrixXd& a) {
    auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
    return s(s.size() - 1);
}

// Point values of the constants from Df(z). Certified xi must not exceed and
// certified mu must not fall below them anywhere in D.
bool respects_points(const RateConstants& k, const Eigen::MatrixXd& A, double L) {
    auto blk = [&](std::vector<int> r, std::vector<int> c) {
        Eigen::MatrixXd m(r.size(), c.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) m(i, j) = A(r[i], c[j]);
        return m;
    };
    const double yy = std::fabs(A(2, 2)), xx = std::fabs(A(1, 1));
    return k.mu_s1 >= yy + op2(blk({2}, {0, 1})) / L && k.mu_s2 >= yy + L * op2(blk({0, 1}, {2})) &&
           k.xi_u1 <= xx - op2(blk({1}, {0, 2})) / L && k.xi_u2 <= xx - L * op2(blk({0, 2}, {1})) &&
           k.mu_cs1 >= op2(blk({0, 2}, {0, 2})) + L * op2(blk({0, 2}, {1})) &&
           k.mu_cs2 >= op2(blk({0, 2}, {0, 2})) + op2(blk({1}, {0, 2})) / L &&
           k.xi_cu1 <= min_sv(blk({0, 1}, {0, 1})) - L * op2(blk({0, 1}, {2})) &&
           k.xi_cu2 <= min_sv(blk({0, 1}, {0, 1})) - op2(blk({2}, {0, 1})) / L;
}

Outcome published_constants() {
    Outcome o;
    const std::pair<double, double> cols[] = {{0.0, 0.0001}, {0.009, 0.01}};
    double worst = 0.0, slowest = 0.0;
    int direction_failures = 0;
    for (int c = 0; c < 2; ++c) {
        HenonParams p;
        p.eps_lo = cols[c].first;
        p.eps_hi = cols[c].second;
        RotatingHenonModel m(p);
        DomainBox box;
        box.R = p.eps_hi;
        auto t0 = std::chrono::steady_clock::now();
        RateConstants k = compute_constants(m, box, Subdivision{64, 1, 1}, kL);
        slowest = std::max(slowest, seconds_since(t0));
        RateConstants ref = published(c);
        for (auto [name, f] : kFields) {
            double rel = std::fabs(k.*f - ref.*f) / ref.*f;
            worst = std::max(worst, rel);
            if (rel > 0.02) {
                o.ok = false;
                o.detail += fmt(" %s[%g,%g]=%g vs %g;", name, p.eps_lo, p.eps_hi, k.*f, ref.*f);
            }
        }
        std::mt19937_64 rng(19 + c);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int s = 0; s < 2000; ++s) {
            HenonParams q = p;
            q.eps_point = p.eps_lo + u(rng) * (p.eps_hi - p.eps_lo);
            RotatingHenonModel mq(q);
            Point z{{u(rng), box.R * (2 * u(rng) - 1), box.R * (2 * u(rng) - 1)}};
            if (!respects_points(k, mq.jacobian(z), kL)) ++direction_failures;
        }
    }
    if (direction_failures) o.ok = false;
    if (slowest >= 60.0) o.ok = false;
    o.detail = fmt("max relative deviation %.2e, pointwise direction violations %d/4000, slowest interval %.3fs",
                   worst, direction_failures, slowest) + o.detail;
    return o;
}

Outcome published_orders() {
    Outcome o;
    RunConfig cfg = load_config(kConfigs + "/henon_eps_009_010.ini");
    auto rows = sweep(cfg, load_partition(kConfigs + "/eps_partition.txt"));
    const int expect[] = {737, 368, 245, 184, 147, 73, 36, 24, 17, 14, 11, 9, 8, 7, 6};
    if (rows.size() != 15) return {false, "partition does not have 15 rows"};
    int exact = 0;
    std::string got;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool good = expect[i] <= 36 ? rows[i].order == expect[i] : std::abs(rows[i].order - expect[i]) <= 2;
        if (!good) o.ok = false;
        if (rows[i].order == expect[i]) ++exact;
        got += (i ? "," : "") + std::to_string(rows[i].order);
    }
    const int from_printed = max_order(published(1), 1000).order;
    const int from_printed_small = max_order(published(0), 1000).order;
    if (from_printed != 6) o.ok = false;
    o.detail = fmt("orders %s; %d/15 exact; printed-constant oracle gives %d for [0.009,0.01] and %d for [0,0.0001]",
                   got.c_str(), exact, from_printed, from_printed_small);
    return o;
}

Outcome section_checks() {
    Outcome o;
    int passed = 0;
    for (auto [lo, hi] : load_partition(kConfigs + "/eps_partition.txt")) {
        HenonParams p;
        p.eps_lo = lo;
        p.eps_hi = hi;
        RotatingHenonModel m(p);
        DomainBox box;
        box.R = hi;
        bool cov = check_covering(m, box, Subdivision{64, 1, 1}).verdict == Verdict::yes;
        bool bc = check_backward_cones(m, box, Subdivision{64, 1, 1}).verdict == Verdict::yes;
        if (cov && bc)
            ++passed;
        else
            o.ok = false;
    }
    RunConfig mc = load_config(kConfigs + "/mobius.ini");
    Certificate mob = certify_config(mc);
    bool refused = !mob.certified && mob.backward_cone.verdict != Verdict::yes && mob.backward_cone.lift_degree == 2 &&
                   mob.backward_cone.detail.find("lift degree") != std::string::npos;
    if (!refused) o.ok = false;
    o.detail = fmt("covering and backward cones hold on %d/15 intervals; mobius: %s", passed,
                   mob.backward_cone.detail.c_str());
    return o;
}

Outcome soundness_suite() {
    constexpr int n = 100000;
    int add = soundness::binary(oracle::Op::add, n), sub = soundness::binary(oracle::Op::sub, n),
        mul = soundness::binary(oracle::Op::mul, n), div = soundness::binary(oracle::Op::div, n),
        pw = soundness::powers(n), tr = soundness::trig(n), inv = soundness::inverse_round_trip(1000);
    Outcome o;
    o.ok = add + sub + mul + div + pw + tr + inv == 0;
    o.detail = fmt("containment failures over 1e5 cases: add %d sub %d mul %d div %d sqr/sqrt/pow %d sin/cos %d; "
                   "inverse round trips (1e3): %d",
                   add, sub, mul, div, pw, tr, inv);
    return o;
}

Outcome cone_suite() {
    HenonParams p;
    p.eps_lo = 0.009;
    p.eps_hi = 0.01;
    RotatingHenonModel m(p);
    DomainBox box;
    box.R = 0.01;
    RateConstants k = compute_constants(m, box, Subdivision{64, 1, 1}, kL);
    props::PairStats s = props::sample_pairs(p, box, k, 1000, 2024);
    Outcome o;
    o.ok = props::passed(s) && s.pairs == 1000;
    o.detail = fmt("%d pairs; image slope max %.4f (<= 1/L = %.4f); expansion min %.6f (>= xi_u1P %.6f); "
                   "contraction max %.6f (<= mu_s1 %.6f); failures %d/%d/%d",
                   s.pairs, s.max_image_slope, 1 / kL, s.min_expansion, k.xi_u1P, s.max_contraction, k.mu_s1,
                   s.cone_failures, s.expansion_failures, s.contraction_failures);
    return o;
}

Outcome manifold_diagnostics() {
    RunConfig cfg = load_config(kConfigs + "/henon_eps_009_010.ini");
    fs::path dir = fs::temp_directory_path() / "nhim_acceptance_manifold";
    auto t0 = std::chrono::steady_clock::now();
    auto ls = run_manifold(cfg, "lambda_star", std::nullopt, std::nullopt, dir.string());
    auto fu = run_manifold(cfg, "fiber_u", Point{{0.3, 0.001, 0.0}}, 8, dir.string());
    const double elapsed = seconds_since(t0);
    Outcome o;
    const auto& wcu = ls["wcu"];
    const auto& wcs = ls["wcs"];
    const auto& lam = ls["lambda_star"];
    const auto& fib = fu["fiber"];
    o.ok = wcu["ratio_ok"].get<bool>() && wcs["spacing_ok"].get<bool>() && lam["invariance_ok"].get<bool>() &&
           fib["spacing_ok"].get<bool>() && elapsed < 300.0;
    double worst_spacing = 0.0;
    for (const auto& e : wcs["depth_spacing"])
        worst_spacing = std::max(worst_spacing, e["spacing_to_final"].get<double>() / e["bound"].get<double>());
    o.detail = fmt("W^cu ratio max %.5f (bound %.5f); W^cs spacing/bound max %.2e; fiber spacing %.2e (bound %.2e); "
                   "Lambda* residual %.2e; %.1fs",
                   wcu["max_ratio"].get<double>(), wcu["ratio_bound"].get<double>(), worst_spacing,
                   fib["depth_spacing"].get<double>(), fib["bound"].get<double>(),
                   lam["invariance_residual"].get<double>(), elapsed);
    return o;
}

JetMap linear_jet(const Eigen::Matrix3d& A) {
    JetMap out;
    for (int i = 0; i < 3; ++i) {
        TruncPoly p(3, 1);
        for (int j = 0; j < 3; ++j) p += A(i, j) * TruncPoly::variable(3, 1, j);
        out.push_back(p);
    }
    return out;
}

Outcome jet_suite() {
    Outcome o;
    // m = 1: R = (A21 + A22 DP)(A11 + A12 DP)^{-1}.
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double identity_err = 0.0;
    for (int t = 0; t < 200; ++t) {
        Eigen::Matrix3d A = Eigen::Matrix3d::NullaryExpr([&] { return u(rng); });
        A(0, 0) += 3.0;
        A(1, 1) += 3.0;
        Eigen::RowVector2d dp(u(rng), u(rng));
        TruncPoly P(2, 1);
        P.set_coeff({1, 0}, dp(0));
        P.set_coeff({0, 1}, dp(1));
        JetMap R = graph_transport(linear_jet(A), JetMap{P}, center_unstable_split(1, 1));
        Eigen::Matrix2d a11 = A.block<2, 2>(0, 0);
        Eigen::Vector2d a12 = A.block<2, 1>(0, 2);
        Eigen::RowVector2d expect = (A.block<1, 2>(2, 0) + A(2, 2) * dp) * (a11 + a12 * dp).inverse();
        identity_err = std::max({identity_err, std::fabs(R[0].coeff({1, 0}) - expect(0)),
                                 std::fabs(R[0].coeff({0, 1}) - expect(1))});
    }

    HenonParams p;
    p.eps_lo = 0.009;
    p.eps_hi = 0.01;
    p.eps_point = 0.01;
    RotatingHenonModel m(p);
    DomainBox box;
    box.R = 0.01;
    GridSpec grid{2048, 33};
    GridGraph wcu = iterate_wcu(m, box, grid);
    GridGraph wcs = solve_wcs(m, box, grid, 14).graph;
    auto orbit = lambda_star_orbit(m, wcu, wcs, 0.7, 20);
    JetIterationResult it = jet_iteration(m, orbit, center_unstable_split(1, 1), 2);
    const TruncPoly& P = it.jets.back()[0];
    Eigen::VectorXd c = fit::local_quartic(wcu, orbit.back(), 24);
    Eigen::Vector2d j1(P.coeff({1, 0}), P.coeff({0, 1})), f1(c[1], c[2]);
    Eigen::Vector3d j2(P.coeff({2, 0}), P.coeff({1, 1}), P.coeff({0, 2})), f2(c[3], c[4], c[5]);
    const double rel1 = (j1 - f1).norm() / j1.norm(), rel2 = (j2 - f2).norm() / j2.norm();
    double slope = -INFINITY;
    for (int d = 0; d < 2; ++d) {
        std::vector<double> norms;
        for (const auto& n : it.norms) norms.push_back(n[d]);
        slope = std::max(slope, fit::log_slope(norms, 11, 20));
    }
    o.ok = identity_err <= 1e-12 && rel1 <= 1e-4 && rel2 <= 1e-4 && slope <= 0.01;
    o.detail = fmt("m=1 identity error %.1e; w^cu jet vs grid fit: order 1 %.1e, order 2 %.1e relative; "
                   "log-slope over steps 11..20 %.2e (running max degree 2 %.3e)",
                   identity_err, rel1, rel2, slope, it.running_max[1]);
    return o;
}

Outcome linear_oracle() {
    RunConfig cfg = load_config(kConfigs + "/linear_test.ini");
    Certificate cert = certify_config(cfg, cfg.k_cap);
    auto model = cfg.make();
    DomainBox box = cfg.domain();
    GridGraph wcu = iterate_wcu(*model, box, cfg.grid);
    GridGraph wcs = solve_wcs(*model, box, cfg.grid, cfg.wcs_depth).graph;
    double chi = 0.0;
    for (int i = 0; i < cfg.lambda_star_nodes; ++i) {
        LambdaStarPoint q = find_lambda_star(wcu, wcs, static_cast<double>(i) / cfg.lambda_star_nodes);
        chi = std::max({chi, std::fabs(q.x), std::fabs(q.y)});
    }
    const double u = wcu.values().cwiseAbs().maxCoeff(), s = wcs.values().cwiseAbs().maxCoeff();
    Outcome o;
    o.ok = cert.certified && cert.rates.order == cfg.k_cap && u == 0.0 && s == 0.0 && chi == 0.0;
    o.detail = fmt("certified=%s order=%d (k_cap %d); max|w^cu|=%g max|w^cs|=%g max|chi|=%g",
                   cert.certified ? "true" : "false", cert.rates.order, cfg.k_cap, u, s, chi);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"published rate constants", published_constants},
        {"published sweep orders", published_orders},
        {"covering and backward cones", section_checks},
        {"interval soundness", soundness_suite},
        {"cone propagation and rates", cone_suite},
        {"manifold diagnostics", manifold_diagnostics},
        {"jets", jet_suite},
        {"linear oracle", linear_oracle},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.ok) ++failed;
        std::printf("criterion %d %s: %s - %s\n", index, o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
