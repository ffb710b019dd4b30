#pragma once

#include <cstddef>

#include "dsepcp/graph.hpp"

namespace dsepcp {

/// Exact d-separation of x and y given z, by reachability over active
/// trails (linear in the size of the DAG).
bool d_separated(const Dag& dag, Var x, Var y, const VarSet& z);

/// Reference implementation: enumerates every simple undirected path between
/// x and y and checks each one for a blocking node. Exponential; meant as a
/// test oracle for small graphs. Throws once more than `path_limit` paths
/// have been visited.
bool d_separated_bruteforce(const Dag& dag, Var x, Var y, const VarSet& z,
                            std::size_t path_limit = 1'000'000);

}  // namespace dsepcp
