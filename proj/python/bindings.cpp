#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nhim/commands.hpp"
#include "nhim/config.hpp"
#include "nhim/errors.hpp"
#include "nhim/manifold.hpp"
#include "nhim/maps.hpp"
#include "nhim/rates.hpp"
#include "nhim/verify.hpp"

namespace py = pybind11;
using namespace nhim;

namespace {

py::dict constants_dict(const RateConstants& k) {
    py::dict d;
    d["mu_s1"] = k.mu_s1;
    d["mu_s2"] = k.mu_s2;
    d["xi_u1"] = k.xi_u1;
    d["xi_u1P"] = k.xi_u1P;
    d["xi_u2"] = k.xi_u2;
    d["mu_cs1"] = k.mu_cs1;
    d["mu_cs2"] = k.mu_cs2;
    d["xi_cu1"] = k.xi_cu1;
    d["xi_cu2"] = k.xi_cu2;
    d["xi_cu1P"] = k.xi_cu1P;
    return d;
}

RunConfig config_from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

PYBIND11_MODULE(_nhim, m) {
    m.doc() = "Rate constants, certification and invariant manifolds for maps on a solid torus";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ManifoldError>(m, "ManifoldError", PyExc_RuntimeError);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("model", &RunConfig::model)
        .def_readwrite("params", &RunConfig::params)
        .def_readwrite("L", &RunConfig::L)
        .def_readwrite("R", &RunConfig::R)
        .def_readwrite("R_Lambda", &RunConfig::R_Lambda)
        .def_readwrite("k_cap", &RunConfig::k_cap)
        .def_readwrite("k_requested", &RunConfig::k_requested)
        .def_property(
            "n_lambda", [](const RunConfig& c) { return c.sub.n_lambda; },
            [](RunConfig& c, int n) { c.sub.n_lambda = n; })
        .def_property(
            "grid", [](const RunConfig& c) { return std::make_pair(c.grid.n_lambda, c.grid.n_fiber); },
            [](RunConfig& c, std::pair<int, int> g) { c.grid = GridSpec{g.first, g.second}; })
        .def_readwrite("wcs_depth", &RunConfig::wcs_depth)
        .def("validate", &RunConfig::validate)
        .def("to_ini", [](const RunConfig& c) {
            std::ostringstream out;
            write_config(out, c);
            return out.str();
        });

    m.def("load_config", &load_config, py::arg("path"));
    m.def("parse_config", &config_from_text, py::arg("text"));
    m.def("model_names", &model_names);

    m.def(
        "evaluate",
        [](const std::string& model, const ParamMap& params, const Eigen::VectorXd& p) {
            return make_model(model, params)->eval_point(p);
        },
        py::arg("model"), py::arg("params"), py::arg("point"));
    m.def(
        "jacobian",
        [](const std::string& model, const ParamMap& params, const Eigen::VectorXd& p) {
            return make_model(model, params)->jacobian(p);
        },
        py::arg("model"), py::arg("params"), py::arg("point"));

    m.def(
        "rate_constants",
        [](const RunConfig& c) {
            c.validate();
            auto model = c.make();
            DomainBox box = c.domain();
            return constants_dict(compute_constants(*model, box, c.sub, box.L));
        },
        py::arg("config"));

    // Certificates cross the boundary as JSON text; the package turns them
    // into dicts.
    m.def(
        "certify_json",
        [](const RunConfig& c, std::optional<int> k) { return to_json(certify_config(c, k), false).dump(); },
        py::arg("config"), py::arg("k") = py::none());

    m.def(
        "sweep",
        [](const RunConfig& c, const std::vector<std::pair<double, double>>& partition) {
            py::list rows;
            for (const auto& r : sweep(c, partition)) {
                py::dict d;
                d["eps_lo"] = r.eps_lo;
                d["eps_hi"] = r.eps_hi;
                d["order"] = r.order;
                d["certified"] = r.certified;
                d["binding"] = r.binding;
                d["covering"] = r.covering;
                d["backward_cone"] = r.backward_cone;
                d["error"] = r.error;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config"), py::arg("partition"));

    m.def(
        "wcu_graph",
        [](const RunConfig& c) {
            c.validate();
            auto model = c.make();
            WcuOptions o;
            o.max_iterations = c.wcu_max_iterations;
            o.tol = c.wcu_tol;
            GridGraph g = iterate_wcu(*model, c.domain(), c.grid, o);
            return py::make_tuple(Eigen::MatrixXd(g.values()), g.sup_distances);
        },
        py::arg("config"), "Node values (n_lambda x n_fiber) and the per-iteration sup distances.");

    m.def(
        "wcs_graph",
        [](const RunConfig& c, std::optional<int> depth) {
            c.validate();
            auto model = c.make();
            WcsOptions o;
            o.residual_tol = c.wcs_residual_tol;
            WcsResult w = solve_wcs(*model, c.domain(), c.grid, depth.value_or(c.wcs_depth), o);
            return Eigen::MatrixXd(w.graph.values());
        },
        py::arg("config"), py::arg("depth") = py::none());

    m.def(
        "manifold_json",
        [](const RunConfig& c, const std::string& target, std::optional<Eigen::VectorXd> z, std::optional<int> n,
           const std::string& out_dir) {
            std::optional<Point> zp;
            if (z) zp = *z;
            return run_manifold(c, target, zp, n, out_dir).dump();
        },
        py::arg("config"), py::arg("target"), py::arg("z") = py::none(), py::arg("n") = py::none(),
        py::arg("out_dir"));
}
