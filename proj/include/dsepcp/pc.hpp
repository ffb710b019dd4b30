#pragma once

#include <cstddef>

#include "dsepcp/ci.hpp"
#include "dsepcp/graph.hpp"

namespace dsepcp {

/// Stable-PC skeleton search over `variables`.
///
/// Starts from the complete graph and, for each order level 0..max_order,
/// tests every adjacent pair against subsets of the current adjacency
/// (snapshotted at the start of the level). Removed edges record their
/// separating set in `sepsets`.
CausalGraph pc_skeleton(const VarSet& variables, CiTester& tester, std::size_t max_order,
                        SepsetCache& sepsets);

}  // namespace dsepcp
