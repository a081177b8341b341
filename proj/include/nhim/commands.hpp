#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nhim/config.hpp"
#include "nhim/verify.hpp"

namespace nhim {

// Process exit codes of the command line tool.
enum ExitStatus { kCertified = 0, kNotCertified = 1, kFailure = 2 };

Certificate certify_config(const RunConfig& cfg, std::optional<int> k = std::nullopt);

// Writes the certificate JSON to `out_path` (cfg.certificate_path when
// empty) and a one-line summary to `log`.
int cmd_certify(const RunConfig& cfg, std::optional<int> k, const std::string& out_path, std::ostream& log);

struct SweepRow {
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    int order = -1;
    bool certified = false;
    std::string binding;
    std::string covering;
    std::string backward_cone;
    std::string error;
};

// One certification per interval, with eps_lo/eps_hi replaced and R following
// eps_hi unless the config fixes it. Errors become rows.
std::vector<SweepRow> sweep(const RunConfig& cfg, const std::vector<std::pair<double, double>>& partition);
void write_sweep_table(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

int cmd_sweep(const RunConfig& cfg, const std::vector<std::pair<double, double>>& partition,
              const std::string& csv_path, std::ostream& log);

// target: wcu, wcs, lambda_star, fiber_u, fiber_s. Writes <target>.csv and
// <target>_diagnostics.json into out_dir.
nlohmann::ordered_json run_manifold(const RunConfig& cfg, const std::string& target, std::optional<Point> z,
                                    std::optional<int> n, const std::string& out_dir);
int cmd_manifold(const RunConfig& cfg, const std::string& target, std::optional<Point> z, std::optional<int> n,
                 const std::string& out_dir, std::ostream& log);

}  // namespace nhim
