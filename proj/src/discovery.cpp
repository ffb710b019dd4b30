#include "dsepcp/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

#include "dsepcp/errors.hpp"
#include "dsepcp/pc.hpp"

namespace dsepcp {

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
        case Algorithm::dsep_cp: return "dsep-cp";
        case Algorithm::cp: return "cp";
        case Algorithm::pc: return "pc";
    }
    return "unknown";
}

std::string_view to_string(TestMode mode) noexcept {
    return mode == TestMode::oracle ? "oracle" : "statistical";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "dsep-cp") return Algorithm::dsep_cp;
    if (text == "cp") return Algorithm::cp;
    if (text == "pc") return Algorithm::pc;
    throw Error(ErrorKind::usage, "unknown algorithm '" + std::string(text) + "'");
}

TestMode parse_test_mode(std::string_view text) {
    if (text == "oracle") return TestMode::oracle;
    if (text == "statistical") return TestMode::statistical;
    throw Error(ErrorKind::usage, "unknown mode '" + std::string(text) + "'");
}

std::size_t DiscoveryConfig::default_thresh_size(std::size_t n) { return std::max<std::size_t>(n / 10, 3); }

void DiscoveryConfig::validate() const {
    if (graph_thresh_size < 3) throw Error(ErrorKind::domain, "graph_thresh_size must be >= 3");
    if (k_thresh < 1) throw Error(ErrorKind::domain, "k_thresh must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::domain, "alpha must lie in (0, 1)");
}

// ---------------------------------------------------------------------------

void RefineLog::record(Var a, Var b, std::uint64_t tests, bool removed) {
    Edge key{std::min(a, b), std::max(a, b)};
    auto& audit = edges_[key];
    audit.edge = key;
    audit.tests += tests;
    audit.removed = audit.removed || removed;
}

std::vector<EdgeAudit> RefineLog::audits() const {
    std::vector<EdgeAudit> out;
    for (const auto& [edge, audit] : edges_) out.push_back(audit);
    return out;
}

std::size_t RefineLog::removed_edges() const {
    return static_cast<std::size_t>(std::count_if(
        edges_.begin(), edges_.end(), [](const auto& e) { return e.second.removed; }));
}

std::uint64_t RefineLog::tests_on_removed() const {
    std::uint64_t total = 0;
    for (const auto& [edge, audit] : edges_) {
        if (audit.removed) total += audit.tests;
    }
    return total;
}

std::uint64_t RefineLog::tests_on_kept() const {
    std::uint64_t total = 0;
    for (const auto& [edge, audit] : edges_) {
        if (!audit.removed) total += audit.tests;
    }
    return total;
}

// ---------------------------------------------------------------------------

CausalGraph merge(const CausalGraph& g1, const CausalGraph& g2) {
    if (g1.mode() != g2.mode()) throw Error(ErrorKind::contract, "cannot merge graphs of different modes");
    if (g1.universe() != g2.universe()) throw Error(ErrorKind::contract, "graphs use different universes");
    CausalGraph out(g1.universe(), set_union(g1.variables(), g2.variables()), g1.mode());
    for (Var i : out.variables()) {
        for (Var j : out.variables()) {
            if (i == j) continue;
            const bool in1 = g1.contains(i) && g1.contains(j);
            const bool in2 = g2.contains(i) && g2.contains(j);
            bool value = false;
            if (in1 && in2) {
                value = g1.dir(i, j) && g2.dir(i, j);
            } else if (in1) {
                value = g1.dir(i, j);
            } else if (in2) {
                value = g2.dir(i, j);
            }
            if (value) out.set_dir(i, j, true);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ColliderProbe::ColliderProbe(const CausalGraph& graph, CiTester& tester, std::size_t k_thresh,
                             const SepsetCache& sepsets, ProbeScope scope)
    : graph_(graph), tester_(tester), k_thresh_(k_thresh), sepsets_(sepsets), scope_(scope) {}

void ColliderProbe::edges_changed() { parents_.clear(); }

bool ColliderProbe::separable_around(Var v, Var u, Var w) {
    if (u > w) std::swap(u, w);
    auto key = std::make_tuple(u, w, v);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool separable = false;
    if (auto cached = sepsets_.find(u, w); cached && !contains(*cached, v)) {
        separable = true;
    } else {
        const VarSet pool = scope_ == ProbeScope::all
                                ? graph_.variables()
                                : set_union(graph_.neighbors(u), graph_.neighbors(w));
        const VarSet candidates = without(pool, {u, w, v});
        separable = find_separating_set(tester_, u, w, candidates, 0, k_thresh_).has_value();
    }
    memo_.emplace(key, separable);
    return separable;
}

bool ColliderProbe::shielded(Var u, Var w) const {
    return scope_ == ProbeScope::adjacent && graph_.adjacent(u, w);
}

bool ColliderProbe::is_collider(Var v) {
    const VarSet nbrs = graph_.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
            if (shielded(nbrs[i], nbrs[j])) continue;
            if (separable_around(v, nbrs[i], nbrs[j])) return true;
        }
    }
    return false;
}

VarSet ColliderProbe::parents(Var v) {
    if (auto it = parents_.find(v); it != parents_.end()) return it->second;
    const VarSet nbrs = graph_.neighbors(v);
    std::vector<std::uint8_t> member(nbrs.size(), 0);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
            if ((member[i] && member[j]) || shielded(nbrs[i], nbrs[j])) continue;
            if (separable_around(v, nbrs[i], nbrs[j])) member[i] = member[j] = 1;
        }
    }
    VarSet out;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (member[i]) out.push_back(nbrs[i]);
    }
    parents_.emplace(v, out);
    return out;
}

VarSet colliders_undirected(const CausalGraph& graph, CiTester& tester, std::size_t k_thresh,
                            const SepsetCache& sepsets, ProbeScope scope) {
    if (graph.mode() != GraphMode::undirected) {
        throw Error(ErrorKind::contract, "colliders_undirected requires an undirected graph");
    }
    ColliderProbe probe(graph, tester, k_thresh, sepsets, scope);
    VarSet out;
    for (Var v : graph.variables()) {
        if (probe.is_collider(v)) out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

bool exclusive_to(const CausalGraph& mine, const CausalGraph& other, Var v) {
    return mine.contains(v) && !other.contains(v);
}

bool is_y_root(Var w, const CausalGraph& g1, const CausalGraph& g2, const ParentsFn& parents) {
    if (!g1.contains(w) || !g2.contains(w)) return false;
    bool from_g1 = false, from_g2 = false;
    for (Var p : parents(w)) {
        from_g1 = from_g1 || exclusive_to(g1, g2, p);
        from_g2 = from_g2 || exclusive_to(g2, g1, p);
    }
    return from_g1 && from_g2;
}

}  // namespace

bool y_structure_gate(const CausalGraph& graph, Var collider, const CausalGraph& g1,
                      const CausalGraph& g2, const ParentsFn& parents) {
    // Walk backwards from the collider: u is a predecessor of v when the arc
    // u -> v exists and v is not among u's parents. Any Y-structure root
    // other than the collider itself found this way makes it a descendant.
    const std::size_t n = graph.universe();
    std::vector<std::uint8_t> seen(n, 0);
    std::deque<Var> queue{collider};
    seen[collider] = 1;
    while (!queue.empty()) {
        Var v = queue.front();
        queue.pop_front();
        for (Var u : graph.variables()) {
            if (seen[u] || !graph.dir(u, v)) continue;
            if (contains(parents(u), v)) continue;
            seen[u] = 1;
            if (is_y_root(u, g1, g2, parents)) return true;
            queue.push_back(u);
        }
    }
    return false;
}

bool y_structure_gate(const CausalGraph& graph, Var collider, const CausalGraph& g1,
                      const CausalGraph& g2) {
    if (graph.mode() != GraphMode::directed) {
        throw Error(ErrorKind::contract, "parent-free gate form requires a directed graph");
    }
    return y_structure_gate(graph, collider, g1, g2, [&](Var v) { return graph.parents(v); });
}

namespace {

// Tests the edge (center, other) against subsets of `candidates` with sizes
// in [1, max_order]; removes it on the first separating set.
bool refine_edge(CausalGraph& graph, Var center, Var other, const VarSet& candidates,
                 CiTester& tester, std::size_t max_order, SepsetCache& sepsets, RefineLog* log) {
    const std::uint64_t before = tester.total_tests();
    auto z = find_separating_set(tester, center, other, candidates, 1, max_order);
    if (z) {
        graph.remove_edge(center, other);
        sepsets.insert(center, other, *z);
    }
    if (log) log->record(center, other, tester.total_tests() - before, z.has_value());
    return z.has_value();
}

}  // namespace

CausalGraph dsep_cp_refine(const CausalGraph& merged, const CausalGraph& g1,
                           const CausalGraph& g2, CiTester& tester, const DiscoveryConfig& config,
                           SepsetCache& sepsets, RefineLog* log) {
    CausalGraph graph = merged;
    const bool directed = merged.mode() == GraphMode::directed;
    const VarSet shared = set_intersection(g1.variables(), g2.variables());

    // Colliders outside g1 and g2 are skipped, so only shared variables are
    // examined. A gated collider has every edge tested. A collider that is
    // itself a Y-structure root only has its edges to other shared variables
    // tested: those edges survived both sub-problems, yet their separator may
    // need variables exclusive to each side.
    //
    // False edges distort the probe's parent estimates, so once a round
    // removes edges the probe is refreshed on the current graph and the gate
    // is re-evaluated for colliders not yet fully refined.
    std::vector<std::uint8_t> done(merged.universe(), 0), root_done(merged.universe(), 0);
    ColliderProbe probe(graph, tester, config.k_thresh, sepsets, config.probe_scope);
    bool changed = true;
    while (changed) {
        changed = false;
        probe.edges_changed();
        ParentsFn parents = directed ? ParentsFn([&](Var v) { return graph.parents(v); })
                                     : ParentsFn([&](Var v) { return probe.parents(v); });
        struct Target {
            Var collider;
            bool shared_only;
        };
        std::vector<Target> targets;
        for (Var v : shared) {
            if (done[v]) continue;
            const bool collider = directed ? graph.parents(v).size() >= 2 : probe.is_collider(v);
            if (!collider) continue;
            if (y_structure_gate(graph, v, g1, g2, parents)) {
                targets.push_back({v, false});
                done[v] = 1;
            } else if (!root_done[v] && is_y_root(v, g1, g2, parents)) {
                targets.push_back({v, true});
                root_done[v] = 1;
            }
        }

        auto scope = tester.refining();
        for (auto [collider, shared_only] : targets) {
            const VarSet neighbor_set = graph.neighbors(collider);
            const VarSet parent_set = directed ? graph.parents(collider) : neighbor_set;
            for (Var cur : neighbor_set) {
                if (shared_only && !contains(shared, cur)) continue;
                changed = refine_edge(graph, collider, cur, without(parent_set, {cur}), tester,
                                      config.refine_max_order(), sepsets, log) ||
                          changed;
            }
        }
    }
    return graph;
}

CausalGraph cp_refine(const CausalGraph& merged, CiTester& tester, const DiscoveryConfig& config,
                      SepsetCache& sepsets, RefineLog* log) {
    CausalGraph graph = merged;
    auto scope = tester.refining();
    for (auto [x, y] : merged.skeleton_edges()) {
        const VarSet candidates =
            without(set_union(merged.parents(x), merged.parents(y)), {x, y});
        refine_edge(graph, x, y, candidates, tester, config.refine_max_order(), sepsets, log);
    }
    return graph;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

class Recursion {
public:
    Recursion(CiTester& tester, const DiscoveryConfig& config) : tester_(tester), config_(config) {}

    CausalGraph solve(const VarSet& variables, std::size_t depth) {
        summary.max_depth = std::max(summary.max_depth, depth);
        if (variables.size() <= config_.graph_thresh_size || config_.algorithm == Algorithm::pc) {
            return pc(variables);
        }
        ++summary.partition_calls;
        PartitionOptions options;
        options.k_thresh = config_.k_thresh;
        options.zero_rows = config_.zero_rows;
        PartitionResult split = find_causal_partitions(variables, tester_, options);
        sepsets.merge_from(split.matrix.sepsets());
        if (std::max(split.v1.size(), split.v2.size()) == variables.size()) {
            ++summary.pc_fallbacks;
            return pc(variables);
        }
        CausalGraph g1 = solve(split.v1, depth + 1);
        CausalGraph g2 = solve(split.v2, depth + 1);
        CausalGraph merged = merge(g1, g2);

        const auto start = Clock::now();
        CausalGraph refined =
            config_.algorithm == Algorithm::dsep_cp
                ? dsep_cp_refine(merged, g1, g2, tester_, config_, sepsets, &log)
                : cp_refine(merged, tester_, config_, sepsets, &log);
        refining_seconds += std::chrono::duration<double>(Clock::now() - start).count();

        MergeTrace trace;
        trace.depth = depth;
        trace.a = split.a;
        trace.b = split.b;
        trace.c = split.c;
        trace.k_order = split.k_order_used;
        trace.merged_edges = merged.edge_count();
        trace.refined_edges = trace.merged_edges - refined.edge_count();
        summary.merges.push_back(std::move(trace));
        return refined;
    }

    SepsetCache sepsets;
    RefineLog log;
    RecursionSummary summary;
    double refining_seconds = 0.0;

private:
    CausalGraph pc(const VarSet& variables) {
        ++summary.pc_calls;
        return pc_skeleton(variables, tester_, config_.k_thresh, sepsets);
    }

    CiTester& tester_;
    const DiscoveryConfig& config_;
};

}  // namespace

RunReport run_discovery(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config) {
    config.validate();
    if (variables.empty()) throw Error(ErrorKind::contract, "discovery needs at least one variable");
    const auto start = Clock::now();
    const std::uint64_t total_before = tester.total_tests();
    const std::uint64_t refining_before = tester.refining_tests();

    Recursion recursion(tester, config);
    RunReport report;
    report.algorithm = config.algorithm;
    report.graph = recursion.solve(make_varset(variables), 0);
    report.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.refining_seconds = recursion.refining_seconds;
    report.total_ci_tests = tester.total_tests() - total_before;
    report.refining_ci_tests = tester.refining_tests() - refining_before;
    report.refined_edges = recursion.log.removed_edges();
    report.refine_audit = recursion.log.audits();
    report.recursion = std::move(recursion.summary);
    return report;
}

CausalGraph dsep_cp(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config) {
    DiscoveryConfig c = config;
    c.algorithm = Algorithm::dsep_cp;
    return run_discovery(variables, tester, c).graph;
}

CausalGraph cp_discover(const VarSet& variables, CiTester& tester, const DiscoveryConfig& config) {
    DiscoveryConfig c = config;
    c.algorithm = Algorithm::cp;
    return run_discovery(variables, tester, c).graph;
}

}  // namespace dsepcp
