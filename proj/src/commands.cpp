#include "nhim/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "nhim/errors.hpp"
#include "nhim/rates.hpp"

namespace nhim {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Certificate certify_config(const RunConfig& cfg, std::optional<int> k) {
    cfg.validate();
    auto model = cfg.make();
    return certify(*model, cfg.domain(), k.value_or(cfg.k_requested), cfg.sub, cfg.k_cap);
}

namespace {

void write_text(const std::string& path, const std::string& body) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << body;
}

std::string interval_label(double lo, double hi) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%g, %g]", lo, hi);
    return buf;
}

}  // namespace

int cmd_certify(const RunConfig& cfg, std::optional<int> k, const std::string& out_path, std::ostream& log) {
    try {
        Certificate c = certify_config(cfg, k);
        write_text(out_path.empty() ? cfg.certificate_path : out_path, to_json(c).dump(2) + "\n");
        log << "certified=" << (c.certified ? "true" : "false") << " order=" << c.rates.order << " (requested "
            << c.k_requested << ") binding=" << c.rates.binding_condition
            << " covering=" << to_string(c.covering.verdict)
            << " backward_cone=" << to_string(c.backward_cone.verdict);
        if (c.backward_cone.verdict != Verdict::yes) log << " (" << c.backward_cone.detail << ")";
        log << '\n';
        for (const auto& e : c.errors) log << "error: " << e << '\n';
        return c.certified ? kCertified : kNotCertified;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

std::vector<SweepRow> sweep(const RunConfig& cfg, const std::vector<std::pair<double, double>>& partition) {
    std::vector<SweepRow> rows;
    for (const auto& [lo, hi] : partition) {
        SweepRow row;
        row.eps_lo = lo;
        row.eps_hi = hi;
        try {
            RunConfig c = cfg;
            c.params["eps_lo"] = lo;
            c.params["eps_hi"] = hi;
            c.params.erase("eps_point");
            Certificate cert = certify_config(c);
            row.order = cert.rates.order;
            row.certified = cert.certified;
            row.binding = cert.rates.binding_condition;
            row.covering = to_string(cert.covering.verdict);
            row.backward_cone = to_string(cert.backward_cone.verdict);
            if (!cert.errors.empty()) row.error = cert.errors.front();
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_table(std::ostream& os, const std::vector<SweepRow>& rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-22s %6s %-9s %-12s %-13s %s\n", "eps", "order", "certified", "covering",
                  "backward_cone", "binding");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-22s %6d %-9s %-12s %-13s %s\n", interval_label(r.eps_lo, r.eps_hi).c_str(),
                      r.order, r.certified ? "true" : "false", r.covering.c_str(), r.backward_cone.c_str(),
                      r.error.empty() ? r.binding.c_str() : ("error: " + r.error).c_str());
        os << buf;
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "eps_lo,eps_hi,order,certified,covering,backward_cone,binding,error\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", r.eps_lo, r.eps_hi);
        os << buf << r.order << ',' << (r.certified ? "true" : "false") << ',' << r.covering << ','
           << r.backward_cone << ",\"" << r.binding << "\",\"" << r.error << "\"\n";
    }
}

int cmd_sweep(const RunConfig& cfg, const std::vector<std::pair<double, double>>& partition,
              const std::string& csv_path, std::ostream& log) {
    try {
        auto rows = sweep(cfg, partition);
        write_sweep_table(log, rows);
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        write_text(csv_path.empty() ? (fs::path(cfg.output_dir) / "sweep.csv").string() : csv_path, csv.str());
        return kCertified;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

namespace {

ordered_json constants_json(const RateConstants& k) {
    return {{"mu_s1", k.mu_s1},   {"mu_s2", k.mu_s2},   {"xi_u1", k.xi_u1},   {"xi_u1P", k.xi_u1P},
            {"xi_u2", k.xi_u2},   {"mu_cs1", k.mu_cs1}, {"mu_cs2", k.mu_cs2}, {"xi_cu1", k.xi_cu1},
            {"xi_cu2", k.xi_cu2}, {"xi_cu1P", k.xi_cu1P}};
}

ordered_json wcu_json(const GridGraph& g, const RateConstants& k, double L) {
    std::vector<double> ratios;
    double worst = 0.0;
    for (std::size_t i = 1; i < g.sup_distances.size(); ++i) {
        // Below this level the distances are rounding noise.
        if (g.sup_distances[i - 1] <= 1e-13) break;
        double r = g.sup_distances[i] / g.sup_distances[i - 1];
        ratios.push_back(r);
        worst = std::max(worst, r);
    }
    return {{"iterations", g.iterations},
            {"sup_distances", g.sup_distances},
            {"ratios", ratios},
            {"max_ratio", worst},
            {"ratio_bound", 1.05 * k.mu_s1},
            {"ratio_ok", worst <= 1.05 * k.mu_s1},
            {"lipschitz_estimate", g.lipschitz_estimate()},
            {"lipschitz_bound", L + 0.02},
            {"stalled", g.stalled},
            {"residual", g.residual}};
}

ordered_json wcs_json(const WcsResult& w, const RateConstants& k, double R) {
    ordered_json spacing = ordered_json::array();
    bool ok = true;
    const int depth = static_cast<int>(w.history.size());
    for (int d = 1; d < depth; ++d) {
        double s = (w.history[d - 1] - w.history[depth - 1]).cwiseAbs().maxCoeff();
        double bound = R / std::pow(k.xi_u1P, d);
        ok = ok && s <= bound;
        spacing.push_back({{"depth", d}, {"spacing_to_final", s}, {"bound", bound}});
    }
    return {{"depth", depth},
            {"residual", w.graph.residual},
            {"depth_spacing", spacing},
            {"spacing_ok", ok},
            {"lipschitz_estimate", w.graph.lipschitz_estimate()}};
}

}  // namespace

ordered_json run_manifold(const RunConfig& cfg, const std::string& target, std::optional<Point> z,
                          std::optional<int> n, const std::string& out_dir) {
    cfg.validate();
    auto model = cfg.make();
    const DomainBox box = cfg.domain();
    const RateConstants k = compute_constants(*model, box, cfg.sub, box.L);

    ordered_json diag;
    diag["model"] = model->name();
    diag["target"] = target;
    diag["L"] = box.L;
    diag["R"] = box.R;
    diag["grid"] = {{"n_lambda", cfg.grid.n_lambda}, {"n_fiber", cfg.grid.n_fiber}};
    diag["constants"] = constants_json(k);

    WcuOptions wo;
    wo.max_iterations = cfg.wcu_max_iterations;
    wo.tol = cfg.wcu_tol;
    WcsOptions so;
    so.residual_tol = cfg.wcs_residual_tol;
    so.keep_history = true;

    std::vector<Point> rows;
    if (target == "wcu") {
        GridGraph g = iterate_wcu(*model, box, cfg.grid, wo);
        diag["wcu"] = wcu_json(g, k, box.L);
        rows = graph_rows(g);
    } else if (target == "wcs") {
        WcsResult w = solve_wcs(*model, box, cfg.grid, n.value_or(cfg.wcs_depth), so);
        diag["wcs"] = wcs_json(w, k, box.R);
        rows = graph_rows(w.graph);
    } else if (target == "lambda_star") {
        GridGraph g = iterate_wcu(*model, box, cfg.grid, wo);
        WcsResult w = solve_wcs(*model, box, cfg.grid, cfg.wcs_depth, so);
        LambdaStarCurve curve = lambda_star_curve(*model, g, w.graph, cfg.lambda_star_nodes);
        diag["wcu"] = wcu_json(g, k, box.L);
        diag["wcs"] = wcs_json(w, k, box.R);
        diag["lambda_star"] = {{"nodes", cfg.lambda_star_nodes},
                               {"invariance_residual", curve.invariance_residual},
                               {"invariance_ok", curve.invariance_residual <= 1e-7}};
        rows = curve_rows(curve);
    } else if (target == "fiber_u" || target == "fiber_s") {
        if (!z) throw ConfigError("fiber targets need --z lambda,x,y");
        const int depth = n.value_or(cfg.fiber_depth);
        const int deeper = depth + 4;
        FiberGraph f, ref;
        double bound = 0.0;
        if (target == "fiber_u") {
            GridGraph g = iterate_wcu(*model, box, cfg.grid, wo);
            f = unstable_fiber(*model, g, (*z)[0], (*z)[1], depth, cfg.fiber_nodes);
            ref = unstable_fiber(*model, g, (*z)[0], (*z)[1], deeper, cfg.fiber_nodes);
            bound = 4.0 * box.R / box.L * std::pow(k.mu_cs1 / k.xi_u1P, depth);
        } else {
            WcsResult w = solve_wcs(*model, box, cfg.grid, cfg.wcs_depth, so);
            f = stable_fiber(*model, w.graph, (*z)[0], (*z)[2], depth, cfg.fiber_nodes);
            ref = stable_fiber(*model, w.graph, (*z)[0], (*z)[2], deeper, cfg.fiber_nodes);
            bound = 4.0 * box.R / box.L * std::pow(k.mu_s1 / k.xi_cu1P, depth);
        }
        const double spacing = fiber_distance(f, ref);
        diag["fiber"] = {{"base", {f.base[0], f.base[1], f.base[2]}},
                         {"depth", depth},
                         {"reference_depth", deeper},
                         {"depth_spacing", spacing},
                         {"bound", bound},
                         {"spacing_ok", spacing <= bound},
                         {"residual", f.residual},
                         {"lipschitz_estimate", f.lipschitz_estimate()},
                         {"lipschitz_bound", 1.0 / box.L + 0.02}};
        rows = fiber_rows(f);
    } else {
        throw ConfigError("unknown manifold target '" + target + "'");
    }

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / (target + ".csv"));
    if (!csv) throw ConfigError("cannot write into '" + out_dir + "'");
    write_csv(csv, model->name(), target, box.L, box.R, rows);
    write_text((fs::path(out_dir) / (target + "_diagnostics.json")).string(), diag.dump(2) + "\n");
    return diag;
}

int cmd_manifold(const RunConfig& cfg, const std::string& target, std::optional<Point> z, std::optional<int> n,
                 const std::string& out_dir, std::ostream& log) {
    try {
        ordered_json d = run_manifold(cfg, target, z, n, out_dir);
        log << "wrote " << (fs::path(out_dir) / (target + ".csv")).string() << '\n';
        if (d.contains("lambda_star")) log << "invariance residual " << d["lambda_star"]["invariance_residual"] << '\n';
        return kCertified;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace nhim
