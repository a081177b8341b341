#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhim/geometry.hpp"
#include "nhim/maps.hpp"
#include "nhim/rates.hpp"

namespace nhim {

inline constexpr const char* kVersion = "0.1.0";

// Outcome of a rigorous check. `inconclusive` means the interval bound touched
// the threshold without a point evaluation refuting the claim.
enum class Verdict { yes, no, inconclusive };

// "true", "false", "inconclusive".
const char* to_string(Verdict v);

struct CoveringResult {
    Verdict verdict = Verdict::inconclusive;
    std::string detail;
    // Largest |pi_y f| bound over D (must stay below R).
    double y_bound = 0.0;
    // Upper bound of pi_x f on the left exit face (must be < -R).
    double left_max = 0.0;
    // Lower bound of pi_x f on the right exit face (must be > R).
    double right_min = 0.0;
    // Lower bound of m(d f_x / d x) over D.
    double m_x_lb = 0.0;
};

// Interior and exit-face checks: |pi_y f| < R on D, pi_x f < -R on the face
// x = -R, pi_x f > R on x = R and m(d f_x / dx) > 0. Requires u = 1.
CoveringResult check_covering(const MapModel& model, const DomainBox& box, const Subdivision& sub);

struct BackwardConeResult {
    Verdict verdict = Verdict::inconclusive;
    std::string detail;
    // Certified bound of max |pi_lambda (Df(D))^{-1} U|.
    double lambda_bound = 0.0;
    // Degree of the base map on the circle, 0 when it could not be decided.
    int lift_degree = 0;
};

// Base map of lift degree one with d(pi_lambda f)/d lambda > 0, and
// max |pi_lambda (Df(D))^{-1} U| < R_Lambda with
// U = [-2R/L, 2R/L] x B_u(2R) x B_s(2R).
BackwardConeResult check_backward_cones(const MapModel& model, const DomainBox& box, const Subdivision& sub);

struct LipschitzSummary {
    LipschitzTarget target;
    std::optional<double> M;
};

struct Certificate {
    std::string model;
    ParamMap params;
    DomainBox box;
    Subdivision sub;
    int k_requested = 0;
    CoveringResult covering;
    BackwardConeResult backward_cone;
    RateReport rates;
    std::vector<LipschitzSummary> lipschitz;
    std::vector<std::string> errors;
    bool certified = false;
    std::string version = kVersion;
    std::string generated_at;
};

// Runs the constants, the order, covering and backward cones; never
// short-circuits. Component errors are recorded and make the result
// uncertified.
Certificate certify(const MapModel& model, const DomainBox& box, int k_requested, const Subdivision& sub,
                    int k_cap = 1000);

// JSON body. The timestamp is only added when include_timestamp is set, so
// two runs of the same configuration compare equal otherwise.
nlohmann::ordered_json to_json(const Certificate& c, bool include_timestamp = true);

// Default M grid for a Lipschitz target: 40 points spread over the open
// admissible range.
std::vector<double> default_lipschitz_grid(LipschitzTarget target, double L);

}  // namespace nhim
