#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string_view>
#include <tuple>
#include <vector>

#include "dsepcp/ci.hpp"
#include "dsepcp/graph.hpp"
#include "dsepcp/partition.hpp"

namespace dsepcp {

enum class Algorithm { dsep_cp, cp, pc };
enum class TestMode { oracle, statistical };

/// Where the collider probe looks for separating sets once the cache misses:
/// among the current neighbors of the two endpoints, or among all other
/// variables of the graph.
enum class ProbeScope { adjacent, all };

std::string_view to_string(Algorithm algorithm) noexcept;
std::string_view to_string(TestMode mode) noexcept;
Algorithm parse_algorithm(std::string_view text);
TestMode parse_test_mode(std::string_view text);

struct DiscoveryConfig {
    Algorithm algorithm = Algorithm::dsep_cp;
    TestMode mode = TestMode::statistical;
    /// Sub-problems at or below this size are solved by PC directly.
    std::size_t graph_thresh_size = 3;
    /// Cap on conditioning-set size for partitioning, PC and refinement.
    std::size_t k_thresh = 3;
    double alpha = 0.05;
    /// Refinement conditions on 0 < |Z| < k_thresh by default; when set the
    /// upper bound becomes |Z| <= k_thresh.
    bool inclusive_refine_bound = false;
    /// Zero the selected variable's row as well as its column while
    /// partitioning.
    bool zero_rows = false;
    ProbeScope probe_scope = ProbeScope::adjacent;

    /// max(floor(n / 10), 3).
    static std::size_t default_thresh_size(std::size_t n);

    /// Largest conditioning-set size tried during refinement.
    std::size_t refine_max_order() const {
        return inclusive_refine_bound ? k_thresh : (k_thresh == 0 ? 0 : k_thresh - 1);
    }

    void validate() const;
};

/// Per-edge record of the refinement CI-tests.
struct EdgeAudit {
    Edge edge;
    std::uint64_t tests = 0;
    bool removed = false;
};

/// Collects refinement activity across one run.
class RefineLog {
public:
    void record(Var a, Var b, std::uint64_t tests, bool removed);
    std::vector<EdgeAudit> audits() const;
    std::size_t examined_edges() const noexcept { return edges_.size(); }
    std::size_t removed_edges() const;
    /// Refinement tests spent on removed edges (false) and on kept edges (kept).
    std::uint64_t tests_on_removed() const;
    std::uint64_t tests_on_kept() const;

private:
    std::map<Edge, EdgeAudit> edges_;
};

/// Trace of one split-and-merge step of the recursion.
struct MergeTrace {
    std::size_t depth = 0;
    VarSet a, b, c;
    std::size_t k_order = 0;
    std::size_t merged_edges = 0;
    std::size_t refined_edges = 0;
};

struct RecursionSummary {
    std::size_t partition_calls = 0;
    std::size_t pc_calls = 0;
    /// PC runs caused by a partition that did not shrink the problem.
    std::size_t pc_fallbacks = 0;
    std::size_t max_depth = 0;
    std::vector<MergeTrace> merges;
};

struct RunReport {
    Algorithm algorithm = Algorithm::dsep_cp;
    CausalGraph graph;
    std::uint64_t total_ci_tests = 0;
    std::uint64_t refining_ci_tests = 0;
    std::size_t refined_edges = 0;
    double total_seconds = 0.0;
    double refining_seconds = 0.0;
    std::vector<EdgeAudit> refine_audit;
    RecursionSummary recursion;
};

/// Entry-wise AND of two graphs over the union of their variables. Pairs
/// that only one graph covers keep that graph's entries.
CausalGraph merge(const CausalGraph& g1, const CausalGraph& g2);

/// Decides collider candidates of an undirected graph from CI-tests.
///
/// Neighbors u, w of v are "separable around v" when some Z with v not in Z
/// and |Z| <= k_thresh separates them: the cached sepset is tried first,
/// then subsets of the candidate pool in ascending size. The pool is
/// adj(u) | adj(w) minus {u, v, w} for ProbeScope::adjacent, or every other
/// graph variable for ProbeScope::all. The adjacent scope also skips
/// shielded pairs (u and w adjacent themselves), as in unshielded-triple
/// collider detection. Triple results are memoized for the
/// probe's lifetime: edges are only ever removed, so a found separator stays
/// valid and a shrinking pool cannot turn a miss into a hit.
class ColliderProbe {
public:
    ColliderProbe(const CausalGraph& graph, CiTester& tester, std::size_t k_thresh,
                  const SepsetCache& sepsets, ProbeScope scope = ProbeScope::adjacent);
    ColliderProbe(const CausalGraph&, CiTester&, std::size_t, SepsetCache&&,
                  ProbeScope = ProbeScope::adjacent) = delete;

    bool separable_around(Var v, Var u, Var w);
    /// True when some pair of v's neighbors is separable around v.
    bool is_collider(Var v);
    /// Neighbors of v that belong to a pair separable around v.
    VarSet parents(Var v);
    /// Call after edges were removed from the graph; drops parent sets.
    void edges_changed();

private:
    bool shielded(Var u, Var w) const;

    const CausalGraph& graph_;
    CiTester& tester_;
    std::size_t k_thresh_;
    const SepsetCache& sepsets_;
    ProbeScope scope_;
    std::map<std::tuple<Var, Var, Var>, bool> memo_;
    std::map<Var, VarSet> parents_;
};

VarSet colliders_undirected(const CausalGraph& graph, CiTester& tester, std::size_t k_thresh,
                            const SepsetCache& sepsets = {},
                            ProbeScope scope = ProbeScope::adjacent);

using ParentsFn = std::function<VarSet(Var)>;

/// True when `collider` descends from a different collider that lies in both
/// sub-graphs and has one parent exclusive to each of them.
///
/// Descent follows arcs u -> v of G that do not point back into parents(u);
/// for undirected G the parents come from the collider probe, so an edge is
/// only walked away from the separable pairs that make u a collider.
bool y_structure_gate(const CausalGraph& graph, Var collider, const CausalGraph& g1,
                      const CausalGraph& g2, const ParentsFn& parents);

/// Directed-graph form: parents are read from the arcs of `graph`.
bool y_structure_gate(const CausalGraph& graph, Var collider, const CausalGraph& g1,
                      const CausalGraph& g2);

/// Y-structure-gated refinement of a merged graph.
CausalGraph dsep_cp_refine(const CausalGraph& merged, const CausalGraph& g1,
                           const CausalGraph& g2, CiTester& tester, const DiscoveryConfig& config,
                           SepsetCache& sepsets, RefineLog* log = nullptr);

/// Baseline refinement: every edge is tested against subsets of its
/// endpoints' parents (directed) or neighbors (undirected).
CausalGraph cp_refine(const CausalGraph& merged, CiTester& tester, const DiscoveryConfig& config,
                      SepsetCache& sepsets, RefineLog* log = nullptr);

/// Full run of the configured algorithm with counters and timing.
RunReport run_discovery(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config);

CausalGraph dsep_cp(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config);
CausalGraph cp_discover(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config);

}  // namespace dsepcp
