#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhim/geometry.hpp"
#include "nhim/interval_matrix.hpp"
#include "nhim/maps.hpp"

namespace nhim {

// The ten expansion / contraction constants. xi values are certified lower
// bounds, mu values certified upper bounds.
struct RateConstants {
    double mu_s1 = 0.0;
    double mu_s2 = 0.0;
    double xi_u1 = 0.0;
    double xi_u1P = 0.0;
    double xi_u2 = 0.0;
    double mu_cs1 = 0.0;
    double mu_cs2 = 0.0;
    double xi_cu1 = 0.0;
    double xi_cu2 = 0.0;
    double xi_cu1P = 0.0;
    double L = 0.0;
};

// Norm bounds of the derivative blocks of one enclosure. Block names read
// "component / variables", e.g. y_lx = d f_y / d (lambda, x).
struct BlockBounds {
    double y_y = 0.0;
    double y_lx = 0.0;
    double lx_y = 0.0;
    double x_ly = 0.0;
    double ly_x = 0.0;
    double ly_ly = 0.0;
    double m_x_x = 0.0;    // lower bound of m(d f_x / d x)
    double m_lx_lx = 0.0;  // lower bound of m(d f_(lambda,x) / d (lambda,x))
};

BlockBounds block_bounds(const IntervalMatrix& df, int u, int s);

// How sup/inf over D are taken. `hull` evaluates every block expression on
// the interval hull of all sub-box enclosures; `per_box` evaluates each
// expression on each sub-box and reduces, which is sharper.
enum class ConstantsMode { hull, per_box };

// Everything the constants and the Lipschitz search need from the
// enclosures of Df over a subdivision.
struct EnclosureData {
    IntervalMatrix hull;
    BlockBounds global;
    std::vector<BlockBounds> per_box;
    // inf over charts P(z) of the m-bounds on the chart hull.
    double m_x_x_chart = 0.0;
    double m_lx_lx_chart = 0.0;
    ConstantsMode mode = ConstantsMode::hull;
};

EnclosureData collect_enclosures(const MapModel& model, const DomainBox& box, const Subdivision& sub,
                                 ConstantsMode mode = ConstantsMode::hull);

RateConstants constants_from_data(const EnclosureData& data, double L);

RateConstants compute_constants(const MapModel& model, const DomainBox& box, const Subdivision& sub, double L,
                                ConstantsMode mode = ConstantsMode::hull);

// Constants from a single enclosure of Df over D (the chart restriction is
// then the whole enclosure).
RateConstants constants_from_enclosure(const IntervalMatrix& df, int u, int s, double L);

struct RateCheck {
    bool ok = false;
    // Tag of the first violated inequality; empty when ok.
    std::string failing;
};

// Rate conditions of order k (k = 0: only the order-zero inequalities).
RateCheck check_rate_conditions(const RateConstants& rc, int k);

struct RateReport {
    RateConstants constants;
    // Largest certified order, -1 when order 0 fails.
    int order = -1;
    // First inequality violated at order + 1, or "k_cap".
    std::string binding_condition;
    int k_cap = 0;
};

RateReport max_order(const RateConstants& rc, int k_cap);

enum class LipschitzTarget { w_s_fiber, w_u_fiber, w_cu, w_cs };

const char* to_string(LipschitzTarget t);
LipschitzTarget lipschitz_target_from_string(const std::string& name);

struct LipschitzSample {
    double M = 0.0;
    double xi = 0.0;
    double mu = 0.0;
    bool certified = false;
};

struct LipschitzResult {
    // Smallest certified M of the grid, empty when none is certified.
    std::optional<double> M;
    std::vector<LipschitzSample> samples;
};

// xi(M), mu(M) of the Lipschitz search for the given target.
LipschitzSample lipschitz_sample(const EnclosureData& data, LipschitzTarget target, double M);

// M_grid must lie in (0, 1/L) for fiber targets and (0, L) for center targets;
// other values throw ConfigError.
LipschitzResult lipschitz_bound_search(const MapModel& model, const DomainBox& box, const Subdivision& sub,
                                       LipschitzTarget target, const std::vector<double>& M_grid);
LipschitzResult lipschitz_bound_search(const EnclosureData& data, double L, LipschitzTarget target,
                                       const std::vector<double>& M_grid);

}  // namespace nhim
