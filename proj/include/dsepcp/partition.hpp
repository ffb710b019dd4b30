#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dsepcp/ci.hpp"
#include "dsepcp/graph.hpp"

namespace dsepcp {

/// Symmetric boolean matrix over a variable set: entry (a, b) is set when a
/// and b were separated by some Z of size <= k_order drawn from the rest of
/// the set. The witnessing sets are kept in `sepsets`.
class IndependenceMatrix {
public:
    IndependenceMatrix() = default;
    IndependenceMatrix(VarSet variables, std::size_t k_order);

    const VarSet& variables() const noexcept { return variables_; }
    std::size_t k_order() const noexcept { return k_order_; }
    const SepsetCache& sepsets() const noexcept { return sepsets_; }

    /// Lookup by variable id; both must belong to the matrix.
    bool separated(Var a, Var b) const;
    /// Lookup by position in variables().
    bool at(std::size_t i, std::size_t j) const { return bits_[i * variables_.size() + j] != 0; }

    void mark(std::size_t i, std::size_t j, VarSet witness);

    /// Separated pairs (a < b) as variable ids.
    std::vector<Edge> separated_pairs() const;

    /// Same variables and same entries; k_order and witnesses are ignored.
    bool same_entries(const IndependenceMatrix& other) const;

private:
    std::size_t position(Var v) const;

    VarSet variables_;
    std::size_t k_order_ = 0;
    std::vector<std::uint8_t> bits_;
    SepsetCache sepsets_;
};

/// Builds the matrix at `k_order`. With `previous` (same variables, lower
/// order) the pairs it already separates are copied without retesting and
/// only conditioning sets larger than previous->k_order() are enumerated.
IndependenceMatrix independence_matrix(const VarSet& variables, CiTester& tester,
                                       std::size_t k_order,
                                       const IndependenceMatrix* previous = nullptr);

struct PartitionOptions {
    /// Upper bound on conditioning-set size; k_order escalates while
    /// k_order + 1 < k_thresh.
    std::size_t k_thresh = 3;
    /// Also zero the selected variable's row of the priority matrix.
    bool zero_rows = false;
};

struct PartitionResult {
    VarSet a, b, c;
    VarSet v1, v2;
    std::size_t k_order_used = 0;
    bool efficient = false;
    /// Assignment rounds run (1 + number of k_order escalations).
    std::size_t rounds = 0;
    IndependenceMatrix matrix;
};

/// Splits `variables` into A, B, C with every A x B pair separated, and
/// returns V1 = A + C, V2 = B + C.
///
/// Variables are taken in priority order (most separations in the working
/// copy of the matrix first, lowest id on ties). A variable joins A when B
/// is non-empty and it is separated from all of B, otherwise B when it is
/// separated from all of A, otherwise C. A round is inefficient when
/// |C| >= |A| + |B| or one side stayed empty; the round is then repeated at
/// the next k_order while k_order + 1 < k_thresh.
PartitionResult find_causal_partitions(const VarSet& variables, CiTester& tester,
                                       const PartitionOptions& options = {});

}  // namespace dsepcp
