// Command line front end: certify, sweep, manifold.
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nhim/commands.hpp"
#include "nhim/errors.hpp"

namespace {

nhim::Point parse_point(const std::string& text) {
    std::istringstream is(text);
    double v[3];
    char c1 = 0, c2 = 0;
    if (!(is >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',') {
        throw nhim::ConfigError("--z expects lambda,x,y");
    }
    return nhim::Point{{v[0], v[1], v[2]}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rate constants, certification and invariant manifolds for maps on a solid torus"};
    app.require_subcommand(1);

    std::string config;
    std::optional<int> k;
    std::string out;
    auto* certify = app.add_subcommand("certify", "Certify covering, backward cones and rate conditions");
    certify->add_option("--config", config, "INI configuration")->required();
    certify->add_option("--k", k, "Requested smoothness order");
    certify->add_option("--out", out, "Certificate path (default from config)");

    std::string partition;
    std::string csv;
    auto* sweep = app.add_subcommand("sweep", "Order of the rate conditions over a partition of eps");
    sweep->add_option("--config", config, "INI configuration")->required();
    sweep->add_option("--partition", partition, "File with one lo,hi pair per line")->required();
    sweep->add_option("--csv", csv, "CSV output path (default <output.dir>/sweep.csv)");

    std::string target;
    std::string z_text;
    std::optional<int> n;
    std::string dir;
    auto* manifold = app.add_subcommand("manifold", "Construct W^cu, W^cs, Lambda* or fibers");
    manifold->add_option("--config", config, "INI configuration")->required();
    manifold->add_option("--target", target, "wcu, wcs, lambda_star, fiber_u or fiber_s")
        ->required()
        ->check(CLI::IsMember({"wcu", "wcs", "lambda_star", "fiber_u", "fiber_s"}));
    manifold->add_option("--z", z_text, "Base point lambda,x,y for fibers");
    manifold->add_option("--n", n, "Depth (W^cs or fibers)");
    manifold->add_option("--out", dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : nhim::kFailure;
    }

    try {
        nhim::RunConfig cfg = nhim::load_config(config);
        if (*certify) return nhim::cmd_certify(cfg, k, out, std::cout);
        if (*sweep) return nhim::cmd_sweep(cfg, nhim::load_partition(partition), csv, std::cout);
        std::optional<nhim::Point> z;
        if (!z_text.empty()) z = parse_point(z_text);
        return nhim::cmd_manifold(cfg, target, z, n, dir, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nhim::kFailure;
    }
}
