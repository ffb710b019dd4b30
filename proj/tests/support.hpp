#pragma once

#include <algorithm>
#include <initializer_list>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dsepcp/graph.hpp"

namespace testing {

using namespace dsepcp;

inline std::string fixture(const std::string& name) { return std::string(DSEPCP_DATA_DIR) + "/" + name; }

inline Dag load(const std::string& name) { return read_edge_list_file(fixture(name)); }

inline Var id(const Dag& dag, const std::string& name) { return dag.index_of(name); }

inline VarSet ids(const Dag& dag, std::initializer_list<const char*> names) {
    std::vector<Var> out;
    for (const char* n : names) out.push_back(dag.index_of(n));
    return make_varset(std::move(out));
}

// Space-separated names, for readable failure messages.
inline std::string names_of(const Dag& dag, const VarSet& vars) {
    std::string out;
    for (Var v : vars) out += (out.empty() ? "" : " ") + dag.name(v);
    return out;
}

// Unordered edges by name, each pair sorted.
using NamedEdges = std::set<std::pair<std::string, std::string>>;

inline std::pair<std::string, std::string> named(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {a, b};
}

inline NamedEdges named_edges(const CausalGraph& g, const Dag& dag) {
    NamedEdges out;
    for (auto [a, b] : g.skeleton_edges()) out.insert(named(dag.name(a), dag.name(b)));
    return out;
}

inline NamedEdges named_pairs(const std::vector<Edge>& pairs, const Dag& dag) {
    NamedEdges out;
    for (auto [a, b] : pairs) out.insert(named(dag.name(a), dag.name(b)));
    return out;
}

inline NamedEdges named_list(std::initializer_list<std::pair<const char*, const char*>> pairs) {
    NamedEdges out;
    for (auto [a, b] : pairs) out.insert(named(a, b));
    return out;
}

// Adds every (x, y) pair of `dag` not joined by an arc in either direction.
inline std::vector<Edge> nonadjacent_pairs(const Dag& dag) {
    std::vector<Edge> out;
    for (Var x = 0; x < static_cast<Var>(dag.size()); ++x) {
        for (Var y = x + 1; y < static_cast<Var>(dag.size()); ++y) {
            if (!dag.has_edge(x, y) && !dag.has_edge(y, x)) out.emplace_back(x, y);
        }
    }
    return out;
}

}  // namespace testing
