#include "nhim/transport.hpp"

#include <algorithm>

#include "nhim/errors.hpp"

namespace nhim {

GraphSplit center_unstable_split(int u, int s) {
    GraphSplit sp;
    for (int i = 0; i <= u; ++i) sp.theta.push_back(static_cast<std::size_t>(i));
    for (int i = 0; i < s; ++i) sp.graph.push_back(static_cast<std::size_t>(1 + u + i));
    return sp;
}

GraphSplit unstable_fiber_split(int u, int s) {
    GraphSplit sp;
    for (int i = 0; i < u; ++i) sp.theta.push_back(static_cast<std::size_t>(1 + i));
    sp.graph.push_back(0);
    for (int i = 0; i < s; ++i) sp.graph.push_back(static_cast<std::size_t>(1 + u + i));
    return sp;
}

JetMap graph_transport(const JetMap& f_jet, const JetMap& P, const GraphSplit& split) {
    const std::size_t dim = split.theta.size() + split.graph.size();
    if (f_jet.size() != dim) throw ShapeError("graph_transport: map jet has the wrong number of components");
    if (P.size() != split.graph.size()) throw ShapeError("graph_transport: disc jet has the wrong number of components");
    const int nt = static_cast<int>(split.theta.size());
    const int order = f_jet.front().order();
    for (const auto& c : f_jet) {
        if (c.nvars() != static_cast<int>(dim)) throw ShapeError("graph_transport: map jet variables mismatch");
    }

    JetMap inner(dim);
    for (std::size_t k = 0; k < split.theta.size(); ++k) {
        inner[split.theta[k]] = TruncPoly::variable(nt, order, static_cast<int>(k));
    }
    for (std::size_t k = 0; k < split.graph.size(); ++k) {
        if (P[k].nvars() != nt || P[k].order() != order) throw ShapeError("graph_transport: disc jet shape mismatch");
        TruncPoly g = P[k];
        g.set_constant_term(0.0);
        inner[split.graph[k]] = g;
    }
    JetMap image = compose(f_jet, inner);
    JetMap A, B;
    for (auto i : split.theta) A.push_back(image[i]);
    for (auto i : split.graph) B.push_back(image[i]);
    A = without_constants(A);
    B = without_constants(B);
    return compose(B, tpoly_inverse(A));
}

JetIterationResult jet_iteration(const MapModel& model, const std::vector<Point>& orbit, const GraphSplit& split,
                                 int order, JetMap P0) {
    if (orbit.empty()) throw ConfigError("jet_iteration needs a non-empty orbit");
    if (order < 1) throw ConfigError("jet order must be at least 1");
    const int nt = static_cast<int>(split.theta.size());
    if (P0.empty()) {
        for (std::size_t k = 0; k < split.graph.size(); ++k) P0.emplace_back(nt, order);
    }
    JetIterationResult res;
    res.running_max.assign(order, 0.0);
    auto record = [&](const JetMap& P) {
        std::vector<double> row;
        for (int d = 1; d <= order; ++d) {
            row.push_back(degree_norm(P, d));
            res.running_max[d - 1] = std::max(res.running_max[d - 1], row.back());
        }
        res.norms.push_back(row);
        res.jets.push_back(P);
    };
    record(P0);
    for (std::size_t l = 0; l + 1 < orbit.size(); ++l) {
        JetMap next = graph_transport(model.jet(orbit[l], order), res.jets.back(), split);
        record(next);
    }
    return res;
}

}  // namespace nhim
