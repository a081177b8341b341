#include "nhim/config.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nhim/errors.hpp"

namespace nhim {

namespace pt = boost::property_tree;

double RunConfig::effective_R() const {
    if (R) return *R;
    if (model == "rotating_henon") {
        auto it = params.find("eps_hi");
        double eps_hi = it != params.end() ? it->second : 0.0;
        return eps_hi > 0.0 ? eps_hi : 1e-4;
    }
    return 0.01;
}

DomainBox RunConfig::domain() const {
    DomainBox box;
    box.R = effective_R();
    box.R_Lambda = R_Lambda;
    box.L = L;
    std::unique_ptr<MapModel> m = make();
    box.u = m->u();
    box.s = m->s();
    return box;
}

std::unique_ptr<MapModel> RunConfig::make() const { return make_model(model, params); }

void RunConfig::validate() const {
    make();
    domain().validate();
    sub.validate();
    grid.validate();
    auto lo = params.find("eps_lo");
    auto hi = params.find("eps_hi");
    if (lo != params.end() && hi != params.end() && lo->second > hi->second) {
        throw ConfigError("eps_lo must not exceed eps_hi");
    }
    if (k_cap < 0 || k_requested < 0) throw ConfigError("k_cap and k_requested must be non-negative");
    if (wcu_max_iterations < 1 || wcs_depth < 1 || fiber_depth < 1 || fiber_nodes < 2 || lambda_star_nodes < 1) {
        throw ConfigError("manifold budgets must be positive");
    }
}

namespace {

const std::set<std::string> kSections{"model", "domain", "subdivision", "rates", "manifold", "output"};

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback, std::set<std::string>& used) {
    used.insert(key);
    auto v = tree.get_optional<std::string>(key);
    if (!v) return fallback;
    std::istringstream is(*v);
    T out{};
    is >> out;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + *v + "'");
    return out;
}

std::string get_string(const pt::ptree& tree, const std::string& key, const std::string& fallback,
                       std::set<std::string>& used) {
    used.insert(key);
    return tree.get<std::string>(key, fallback);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (!kSections.count(section)) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    }

    RunConfig c;
    std::set<std::string> used;
    c.model = get_string(tree, "model.name", c.model, used);
    if (auto model = tree.get_child_optional("model")) {
        for (const auto& [key, node] : *model) {
            if (key == "name") continue;
            std::istringstream is(node.data());
            double v = 0.0;
            is >> v;
            if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("bad value for model." + key);
            c.params[key] = v;
        }
    }
    c.L = get(tree, "domain.L", c.L, used);
    if (tree.get_optional<std::string>("domain.R")) c.R = get(tree, "domain.R", 0.0, used);
    used.insert("domain.R");
    c.R_Lambda = get(tree, "domain.R_Lambda", c.R_Lambda, used);
    c.sub.n_lambda = get(tree, "subdivision.n_lambda", c.sub.n_lambda, used);
    c.sub.n_x = get(tree, "subdivision.n_x", c.sub.n_x, used);
    c.sub.n_y = get(tree, "subdivision.n_y", c.sub.n_y, used);
    c.k_cap = get(tree, "rates.k_cap", c.k_cap, used);
    c.k_requested = get(tree, "rates.k_requested", c.k_requested, used);
    c.grid.n_lambda = get(tree, "manifold.n_lambda", c.grid.n_lambda, used);
    c.grid.n_fiber = get(tree, "manifold.n_fiber", c.grid.n_fiber, used);
    c.wcu_max_iterations = get(tree, "manifold.wcu_max_iterations", c.wcu_max_iterations, used);
    c.wcu_tol = get(tree, "manifold.wcu_tol", c.wcu_tol, used);
    c.wcs_depth = get(tree, "manifold.wcs_depth", c.wcs_depth, used);
    c.wcs_residual_tol = get(tree, "manifold.wcs_residual_tol", c.wcs_residual_tol, used);
    c.fiber_depth = get(tree, "manifold.fiber_depth", c.fiber_depth, used);
    c.fiber_nodes = get(tree, "manifold.fiber_nodes", c.fiber_nodes, used);
    c.lambda_star_nodes = get(tree, "manifold.lambda_star_nodes", c.lambda_star_nodes, used);
    c.certificate_path = get_string(tree, "output.certificate", c.certificate_path, used);
    c.output_dir = get_string(tree, "output.dir", c.output_dir, used);

    for (const auto& [section, body] : tree) {
        if (section == "model") continue;
        for (const auto& [key, node] : body) {
            if (!used.count(section + "." + key)) throw ConfigError("unknown config key " + section + "." + key);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& c) {
    out << "[model]\nname = " << c.model << '\n';
    for (const auto& [k, v] : c.params) out << k << " = " << fmt(v) << '\n';
    out << "\n[domain]\nL = " << fmt(c.L) << '\n';
    if (c.R) out << "R = " << fmt(*c.R) << '\n';
    out << "R_Lambda = " << fmt(c.R_Lambda) << '\n';
    out << "\n[subdivision]\nn_lambda = " << c.sub.n_lambda << "\nn_x = " << c.sub.n_x << "\nn_y = " << c.sub.n_y
        << '\n';
    out << "\n[rates]\nk_cap = " << c.k_cap << "\nk_requested = " << c.k_requested << '\n';
    out << "\n[manifold]\nn_lambda = " << c.grid.n_lambda << "\nn_fiber = " << c.grid.n_fiber
        << "\nwcu_max_iterations = " << c.wcu_max_iterations << "\nwcu_tol = " << fmt(c.wcu_tol)
        << "\nwcs_depth = " << c.wcs_depth << "\nwcs_residual_tol = " << fmt(c.wcs_residual_tol)
        << "\nfiber_depth = " << c.fiber_depth << "\nfiber_nodes = " << c.fiber_nodes
        << "\nlambda_star_nodes = " << c.lambda_star_nodes << '\n';
    out << "\n[output]\ncertificate = " << c.certificate_path << "\ndir = " << c.output_dir << '\n';
}

std::vector<std::pair<double, double>> parse_partition(std::istream& in) {
    std::vector<std::pair<double, double>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream is(line);
        double lo = 0.0, hi = 0.0;
        char comma = 0;
        if (!(is >> lo >> comma >> hi) || comma != ',' || lo > hi) {
            throw ConfigError("bad partition line " + std::to_string(lineno) + ": '" + line + "'");
        }
        if (!out.empty() && lo < out.back().second) {
            throw ConfigError("partition intervals must be ordered and non-overlapping (line " +
                              std::to_string(lineno) + ")");
        }
        out.emplace_back(lo, hi);
    }
    return out;
}

std::vector<std::pair<double, double>> load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read partition file '" + path + "'");
    return parse_partition(in);
}

}  // namespace nhim
