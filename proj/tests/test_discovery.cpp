#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsepcp/ci.hpp"
#include "dsepcp/discovery.hpp"
#include "dsepcp/dsep.hpp"
#include "dsepcp/errors.hpp"
#include "dsepcp/metrics.hpp"
#include "dsepcp/pc.hpp"
#include "dsepcp/sem.hpp"
#include "support.hpp"

using namespace dsepcp;
using namespace testing;

namespace {

struct Split {
    CausalGraph g1, g2, merged;
    SepsetCache sepsets;
};

// Sub-skeletons of the eight-variable example over V1 = {6,7,8,1,2} and
// V2 = {3,4,5,1,2}, solved by oracle PC.
Split eight_variable_split(const Dag& dag, CiTester& tester) {
    Split s;
    s.g1 = pc_skeleton(ids(dag, {"6", "7", "8", "1", "2"}), tester, 3, s.sepsets);
    s.g2 = pc_skeleton(ids(dag, {"3", "4", "5", "1", "2"}), tester, 3, s.sepsets);
    s.merged = merge(s.g1, s.g2);
    return s;
}

bool subgraph_of(const CausalGraph& small, const CausalGraph& big) {
    for (auto [a, b] : small.skeleton_edges()) {
        if (!big.adjacent(a, b)) return false;
    }
    return true;
}

DiscoveryConfig oracle_config(Algorithm algorithm, std::size_t k_thresh, std::size_t thresh) {
    DiscoveryConfig c;
    c.algorithm = algorithm;
    c.mode = TestMode::oracle;
    c.k_thresh = k_thresh;
    c.graph_thresh_size = thresh;
    return c;
}

}  // namespace

TEST_CASE("names and config") {
    CHECK(parse_algorithm("dsep-cp") == Algorithm::dsep_cp);
    CHECK(parse_algorithm("cp") == Algorithm::cp);
    CHECK(parse_algorithm("pc") == Algorithm::pc);
    CHECK(to_string(Algorithm::dsep_cp) == "dsep-cp");
    CHECK(parse_test_mode(to_string(TestMode::oracle)) == TestMode::oracle);
    CHECK_THROWS_AS(parse_algorithm("ges"), Error);
    CHECK(DiscoveryConfig::default_thresh_size(8) == 3);
    CHECK(DiscoveryConfig::default_thresh_size(50) == 5);
    CHECK(DiscoveryConfig::default_thresh_size(223) == 22);
    DiscoveryConfig c;
    CHECK(c.refine_max_order() == 2);
    c.inclusive_refine_bound = true;
    CHECK(c.refine_max_order() == 3);
    c.graph_thresh_size = 2;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("merge of the eight-variable split") {
    Dag dag = load("fig2.edges");
    OracleTester t(dag);
    Split s = eight_variable_split(dag, t);
    CHECK(named_edges(s.g1, dag) == named_list({{"6", "1"}, {"1", "2"}, {"7", "2"}, {"6", "7"}, {"6", "8"}, {"7", "8"}, {"6", "2"}}));
    CHECK(s.merged.edge_count() == 13);
    NamedEdges expected = named_edges(CausalGraph::skeleton_of(dag), dag);
    expected.insert(named("6", "2"));
    expected.insert(named("3", "2"));
    CHECK(named_edges(s.merged, dag) == expected);
}

TEST_CASE("merge algebra") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const VarSet v1{0, 1, 2, 3, 4}, v2{3, 4, 5, 6};
        CausalGraph a(7, v1, GraphMode::undirected), b(7, v2, GraphMode::undirected);
        for (Var i : v1) {
            for (Var j : v1) {
                if (i < j && rng.uniform() < 0.5) a.add_edge(i, j);
            }
        }
        for (Var i : v2) {
            for (Var j : v2) {
                if (i < j && rng.uniform() < 0.5) b.add_edge(i, j);
            }
        }
        CHECK(merge(a, b) == merge(b, a));
        CHECK(merge(a, a) == a);
        const CausalGraph m = merge(a, b);
        CHECK(m.variables() == set_union(v1, v2));
        CHECK(m.adjacent(3, 4) == (a.adjacent(3, 4) && b.adjacent(3, 4)));
        for (Var i : v1) {
            for (Var j : v1) {
                if (i != j && !(contains(v2, i) && contains(v2, j))) CHECK(m.dir(i, j) == a.dir(i, j));
            }
        }
    }
    CausalGraph u(3, {0, 1}, GraphMode::undirected), d(3, {1, 2}, GraphMode::directed);
    try {
        merge(u, d);
        FAIL("mixed modes merged");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::contract);
    }
}

TEST_CASE("collider probe on the merged graph") {
    Dag dag = load("fig2.edges");
    OracleTester t(dag);
    Split s = eight_variable_split(dag, t);
    // The false edges 3-2 and 6-2 leave (2, 5) and (2, 8) unshielded and
    // separable around 3 and 6, which therefore look like colliders too.
    CHECK(names_of(dag, colliders_undirected(s.merged, t, 3, s.sepsets)) ==
          names_of(dag, ids(dag, {"1", "2", "3", "6"})));

    // On the true skeleton: 1 (3, 6) and 2 (1, 4, 7) are unshielded
    // colliders; 4 and 8 have shielded parents.
    CausalGraph truth = CausalGraph::skeleton_of(dag);
    CHECK(names_of(dag, colliders_undirected(truth, t, 3)) == names_of(dag, ids(dag, {"1", "2"})));
    const VarSet wide = colliders_undirected(truth, t, 3, {}, ProbeScope::all);
    CHECK(set_intersection(wide, ids(dag, {"1", "2"})) == ids(dag, {"1", "2"}));

    SepsetCache none;
    ColliderProbe probe(truth, t, 3, none);
    CHECK(probe.parents(id(dag, "2")) == ids(dag, {"1", "4", "7"}));
    CHECK(probe.separable_around(id(dag, "1"), id(dag, "3"), id(dag, "6")));
    CHECK_FALSE(probe.separable_around(id(dag, "7"), id(dag, "2"), id(dag, "8")));

    CausalGraph directed = CausalGraph::directed_of(dag);
    CHECK_THROWS_AS(colliders_undirected(directed, t, 3), Error);
}

TEST_CASE("probe colliders are directed colliders of the truth") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Dag dag = random_dag(10, 1.5, 500 + seed);
        OracleTester t(dag);
        const VarSet probed = colliders_undirected(CausalGraph::skeleton_of(dag), t, 10);
        const VarSet actual = colliders_directed(CausalGraph::directed_of(dag));
        CHECK(set_difference(probed, actual).empty());
    }
}

TEST_CASE("Y-structure gate") {
    // Merged eight-variable graph, oriented, with 8 -> 7.
    Dag oriented = parse_edge_list("3 1\n6 1\n1 2\n4 2\n7 2\n6 2\n3 2\n3 4\n5 4\n3 5\n6 7\n8 7\n6 8\n");
    const std::size_t n = oriented.size();
    CausalGraph g = CausalGraph::directed_of(oriented);
    CausalGraph g1(n, ids(oriented, {"6", "7", "8", "1", "2"}), GraphMode::directed);
    CausalGraph g2(n, ids(oriented, {"3", "4", "5", "1", "2"}), GraphMode::directed);
    CHECK(y_structure_gate(g, id(oriented, "2"), g1, g2));
    CHECK_FALSE(y_structure_gate(g, id(oriented, "7"), g1, g2));
    CHECK_FALSE(y_structure_gate(g, id(oriented, "1"), g1, g2));
    CHECK_FALSE(y_structure_gate(g, id(oriented, "4"), g1, g2));
    CHECK_FALSE(y_structure_gate(g, id(oriented, "2"), g1, g1));

    CausalGraph undirected = CausalGraph::skeleton_of(oriented);
    CHECK_THROWS_AS(y_structure_gate(undirected, 0, g1, g2), Error);
}

TEST_CASE("gated refinement of the eight-variable example") {
    Dag dag = load("fig2.edges");
    OracleTester t(dag);
    Split s = eight_variable_split(dag, t);
    DiscoveryConfig c = oracle_config(Algorithm::dsep_cp, 3, 5);
    c.inclusive_refine_bound = true;

    RefineLog log;
    const auto before = t.refining_tests();
    CausalGraph out = dsep_cp_refine(s.merged, s.g1, s.g2, t, c, s.sepsets, &log);
    CHECK(out == CausalGraph::skeleton_of(dag));
    NamedEdges examined, removed;
    for (const auto& a : log.audits()) {
        examined.insert(named(dag.name(a.edge.first), dag.name(a.edge.second)));
        if (a.removed) removed.insert(named(dag.name(a.edge.first), dag.name(a.edge.second)));
    }
    CHECK(examined == named_list({{"1", "2"}, {"2", "3"}, {"4", "2"}, {"6", "2"}, {"7", "2"}}));
    CHECK(removed == named_list({{"6", "2"}, {"2", "3"}}));
    CHECK(log.tests_on_removed() + log.tests_on_kept() == t.refining_tests() - before);

    RefineLog cp_log;
    OracleTester t2(dag);
    Split s2 = eight_variable_split(dag, t2);
    CausalGraph cp_out = cp_refine(s2.merged, t2, c, s2.sepsets, &cp_log);
    CHECK(cp_out == CausalGraph::skeleton_of(dag));
    CHECK(cp_log.examined_edges() == 13);
    CHECK(cp_log.removed_edges() == 2);
    CHECK(hit_rate(log.removed_edges(), log.examined_edges() - log.removed_edges()) == doctest::Approx(0.4));
}

TEST_CASE("no colliders, no refinement") {
    Dag dag = parse_edge_list("a b\nb c\nc d");
    OracleTester t(dag);
    SepsetCache sepsets;
    CausalGraph g1 = pc_skeleton(ids(dag, {"a", "b", "c"}), t, 3, sepsets);
    CausalGraph g2 = pc_skeleton(ids(dag, {"b", "c", "d"}), t, 3, sepsets);
    CausalGraph merged = merge(g1, g2);
    RefineLog log;
    CausalGraph out = dsep_cp_refine(merged, g1, g2, t, oracle_config(Algorithm::dsep_cp, 3, 3), sepsets, &log);
    CHECK(out == merged);
    CHECK(t.refining_tests() == 0);
    CHECK(log.examined_edges() == 0);
}

TEST_CASE("small problems are solved by PC") {
    Dag dag = load("fig1.edges");
    OracleTester a(dag), b(dag);
    RunReport r = run_discovery(iota_varset(5), a, oracle_config(Algorithm::dsep_cp, 3, 5));
    SepsetCache sepsets;
    CHECK(r.graph == pc_skeleton(iota_varset(5), b, 3, sepsets));
    CHECK(r.total_ci_tests == b.total_tests());
    CHECK(r.recursion.pc_calls == 1);
    CHECK(r.recursion.partition_calls == 0);
    CHECK(r.refining_ci_tests == 0);
}

TEST_CASE("unsplittable problems fall back to PC") {
    std::string text;
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) text += "v" + std::to_string(i) + " v" + std::to_string(j) + "\n";
    }
    Dag dag = parse_edge_list(text);
    for (auto algorithm : {Algorithm::dsep_cp, Algorithm::cp}) {
        OracleTester t(dag);
        RunReport r = run_discovery(iota_varset(6), t, oracle_config(algorithm, 3, 3));
        CHECK(r.graph.edge_count() == 15);
        CHECK(r.recursion.pc_fallbacks == 1);
        CHECK(r.recursion.merges.empty());
    }
}

TEST_CASE("refinement only removes edges; gated tests never exceed the baseline") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 12 + seed % 10;
        Dag dag = random_dag(n, 1.5, 1200 + seed);
        RunReport r[2];
        int i = 0;
        for (auto algorithm : {Algorithm::dsep_cp, Algorithm::cp}) {
            OracleTester t(dag);
            r[i++] = run_discovery(iota_varset(n), t, oracle_config(algorithm, 3, 4));
        }
        CHECK(r[0].refining_ci_tests <= r[1].refining_ci_tests);
        for (const auto& report : r) {
            CHECK(subgraph_of(CausalGraph::skeleton_of(dag), report.graph));
            CHECK(report.refined_edges <= report.refine_audit.size());
        }

        OracleTester t(dag);
        PartitionResult p = find_causal_partitions(iota_varset(n), t);
        if (!p.efficient) continue;
        SepsetCache sepsets;
        CausalGraph g1 = pc_skeleton(p.v1, t, 3, sepsets), g2 = pc_skeleton(p.v2, t, 3, sepsets);
        CausalGraph merged = merge(g1, g2);
        CHECK(subgraph_of(dsep_cp_refine(merged, g1, g2, t, oracle_config(Algorithm::dsep_cp, 3, 4), sepsets), merged));
    }
}

TEST_CASE("oracle discovery is exact with a large enough order cap") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 8 + seed % 8;
        Dag dag = random_dag(n, 1.5, seed);
        OracleTester t(dag);
        RunReport r = run_discovery(iota_varset(n), t, oracle_config(Algorithm::dsep_cp, n, 3));
        CHECK(r.graph == CausalGraph::skeleton_of(dag));
    }
}

TEST_CASE("a collider separates from its non-descendants through its neighbors") {
    // For y with at least two parents and x neither adjacent to nor a
    // descendant of y, conditioning on y's parents separates them, so a
    // search restricted to y's neighbors (sizes >= 1) succeeds, in line with
    // an unrestricted search.
    std::size_t cases = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 6 + seed % 6;
        Dag dag = random_dag(n, 1.5, 2000 + seed);
        OracleTester t(dag);
        CausalGraph skeleton = CausalGraph::skeleton_of(dag);
        for (Var y = 0; y < static_cast<Var>(n); ++y) {
            if (dag.parents(y).size() < 2) continue;
            const VarSet desc = descendants(dag, y);
            for (Var x = 0; x < static_cast<Var>(n); ++x) {
                if (x == y || skeleton.adjacent(x, y) || contains(desc, x)) continue;
                auto local = find_separating_set(t, y, x, without(skeleton.neighbors(y), {x}), 1, n);
                auto global = exhaustive_sepset_search(t, y, x, without(iota_varset(n), {x, y}), n);
                CHECK(local.has_value());
                CHECK(global.has_value());
                if (local) CHECK(d_separated(dag, x, y, *local));
                ++cases;
            }
        }
    }
    CHECK(cases > 20);
}

TEST_CASE("statistical run on sampled data") {
    Dag dag = load("asia.edges");
    Dataset d = sample_linear_sem(make_sem_spec(dag, 5), 2000, 5);
    FisherZTester t(d, 0.05);
    DiscoveryConfig c;
    c.graph_thresh_size = 3;
    RunReport r = run_discovery(iota_varset(8), t, c);
    CHECK(r.total_ci_tests == t.total_tests());
    CHECK(r.refining_ci_tests == t.refining_tests());
    CHECK(skeleton_scores(r.graph, dag).f1 >= 0.8);
    CHECK(r.total_seconds >= r.refining_seconds);
}
