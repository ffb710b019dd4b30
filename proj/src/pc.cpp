#include "dsepcp/pc.hpp"

#include <algorithm>

#include "dsepcp/errors.hpp"

namespace dsepcp {

namespace {

bool is_subset(const VarSet& sub, const VarSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace

CausalGraph pc_skeleton(const VarSet& variables, CiTester& tester, std::size_t max_order,
                        SepsetCache& sepsets) {
    if (variables.empty()) throw Error(ErrorKind::contract, "PC needs at least one variable");
    CausalGraph graph = CausalGraph::complete(tester.num_variables(), variables);

    for (std::size_t order = 0; order <= max_order; ++order) {
        std::vector<VarSet> adjacency(tester.num_variables());
        for (Var v : graph.variables()) adjacency[v] = graph.neighbors(v);

        bool any_candidate = false;
        for (auto [a, b] : graph.skeleton_edges()) {
            const VarSet from_a = without(adjacency[a], {b});
            const VarSet from_b = without(adjacency[b], {a});
            std::optional<VarSet> found;
            // Test (a, b) against subsets of adj(a), then (b, a) against
            // subsets of adj(b) that were not already tried from a.
            if (from_a.size() >= order) {
                any_candidate = true;
                for_each_subset(from_a, order, [&](const VarSet& z) {
                    if (tester.independent(a, b, z)) found = z;
                    return found.has_value();
                });
            }
            if (!found && from_b.size() >= order) {
                any_candidate = true;
                for_each_subset(from_b, order, [&](const VarSet& z) {
                    if (is_subset(z, from_a)) return false;
                    if (tester.independent(a, b, z)) found = z;
                    return found.has_value();
                });
            }
            if (found) {
                graph.remove_edge(a, b);
                sepsets.insert(a, b, std::move(*found));
            }
        }
        if (!any_candidate) break;
    }
    return graph;
}

}  // namespace dsepcp
