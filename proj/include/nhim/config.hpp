#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhim/geometry.hpp"
#include "nhim/manifold.hpp"
#include "nhim/maps.hpp"

namespace nhim {

// Run configuration read from an INI file with sections [model], [domain],
// [subdivision], [rates], [manifold] and [output]. Every key of [model]
// other than `name` is a model parameter.
struct RunConfig {
    std::string model = "rotating_henon";
    ParamMap params;

    double L = 0.99;
    // Unset means eps_hi for the Henon family (1e-4 when eps_hi = 0) and
    // 0.01 otherwise.
    std::optional<double> R;
    double R_Lambda = 0.5;

    Subdivision sub;

    int k_cap = 1000;
    int k_requested = 0;

    GridSpec grid{2048, 33};
    int wcu_max_iterations = 200;
    double wcu_tol = 1e-15;
    int wcs_depth = 14;
    double wcs_residual_tol = 1e-10;
    int fiber_depth = 12;
    int fiber_nodes = 33;
    int lambda_star_nodes = 128;

    std::string certificate_path = "certificate.json";
    std::string output_dir = "out";

    double effective_R() const;
    DomainBox domain() const;
    std::unique_ptr<MapModel> make() const;
    // Throws ConfigError on invalid combinations.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void write_config(std::ostream& out, const RunConfig& c);

// Lines `lo,hi`; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<double, double>> parse_partition(std::istream& in);
std::vector<std::pair<double, double>> load_partition(const std::string& path);

}  // namespace nhim
