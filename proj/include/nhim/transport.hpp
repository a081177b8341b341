#pragma once

#include <cstddef>
#include <vector>

#include "nhim/jets.hpp"
#include "nhim/maps.hpp"

namespace nhim {

// Which ambient coordinates parameterise a disc (theta) and which are its
// graph values.
struct GraphSplit {
    std::vector<std::size_t> theta;
    std::vector<std::size_t> graph;
};

// theta = (lambda, x), graph = y.
GraphSplit center_unstable_split(int u, int s);
// theta = x, graph = (lambda, y).
GraphSplit unstable_fiber_split(int u, int s);

// Jet of the image disc. With F = f_jet o (theta, P(theta)) split into
// A = pi_theta F - pi_theta f(z) and B = pi_graph F - pi_graph f(z), the
// result is R = B o A^{-1}. P holds one polynomial per graph coordinate in
// the theta variables, with zero constant terms. Throws SingularJetError when
// A has a singular linear part.
JetMap graph_transport(const JetMap& f_jet, const JetMap& P, const GraphSplit& split);

struct JetIterationResult {
    // P^0 .. P^n.
    std::vector<JetMap> jets;
    // norms[l][d - 1] = degree_norm(P^l, d).
    std::vector<std::vector<double>> norms;
    // Running maximum of norms over l, per degree.
    std::vector<double> running_max;
};

// P^{l+1} = graph_transport(jet of f at orbit[l], P^l) for l < orbit.size() - 1.
// An empty P0 starts from the flat disc.
JetIterationResult jet_iteration(const MapModel& model, const std::vector<Point>& orbit, const GraphSplit& split,
                                 int order, JetMap P0 = {});

}  // namespace nhim
