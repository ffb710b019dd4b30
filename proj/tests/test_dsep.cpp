#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsepcp/ci.hpp"
#include "dsepcp/dsep.hpp"
#include "dsepcp/errors.hpp"
#include "dsepcp/sem.hpp"
#include "support.hpp"

using namespace dsepcp;
using namespace testing;

TEST_CASE("collider example") {
    Dag dag = load("fig1.edges");
    const Var v1 = id(dag, "1"), v2 = id(dag, "2"), v3 = id(dag, "3"), v4 = id(dag, "4"),
              v5 = id(dag, "5");
    CHECK(d_separated(dag, v1, v3, {}));
    CHECK_FALSE(d_separated(dag, v1, v3, {v2}));
    CHECK(d_separated(dag, v2, v5, {v4}));
    CHECK(d_separated(dag, v1, v5, {v4}));
    CHECK(d_separated(dag, v3, v5, {v4}));
    CHECK_FALSE(d_separated(dag, v2, v5, {}));
}

TEST_CASE("chain") {
    Dag dag = parse_edge_list("a b\nb c");
    const Var a = id(dag, "a"), b = id(dag, "b"), c = id(dag, "c");
    CHECK(d_separated(dag, a, c, {b}));
    CHECK_FALSE(d_separated(dag, a, c, {}));
    CHECK(d_separated_bruteforce(dag, a, c, {b}));
    CHECK_FALSE(d_separated_bruteforce(dag, a, c, {}));
}

TEST_CASE("conditioning on a descendant of a collider opens it") {
    Dag dag = parse_edge_list("a c\nb c\nc d");
    const Var a = id(dag, "a"), b = id(dag, "b"), d = id(dag, "d");
    CHECK(d_separated(dag, a, b, {}));
    CHECK_FALSE(d_separated(dag, a, b, {d}));
    CHECK_FALSE(d_separated_bruteforce(dag, a, b, {d}));
}

TEST_CASE("agrees with path enumeration on the collider example, |z| <= 1") {
    Dag dag = load("fig1.edges");
    const int n = static_cast<int>(dag.size());
    int cases = 0;
    for (Var x = 0; x < n; ++x) {
        for (Var y = 0; y < n; ++y) {
            if (x == y) continue;
            CHECK(d_separated(dag, x, y, {}) == d_separated_bruteforce(dag, x, y, {}));
            ++cases;
            for (Var z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                CHECK(d_separated(dag, x, y, {z}) == d_separated_bruteforce(dag, x, y, {z}));
                ++cases;
            }
        }
    }
    CHECK(cases == 80);
}

TEST_CASE("agrees with path enumeration on random DAGs; symmetric; adjacency") {
    std::size_t cases = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 4 + seed % 7;
        Dag dag = random_dag(n, 1.5, 700 + seed);
        const VarSet all = iota_varset(n);
        for (Var x = 0; x < static_cast<Var>(n); ++x) {
            for (Var y = x + 1; y < static_cast<Var>(n); ++y) {
                const VarSet rest = without(all, {x, y});
                const bool adjacent = dag.has_edge(x, y) || dag.has_edge(y, x);
                for (std::size_t k = 0; k <= 2; ++k) {
                    for_each_subset(rest, k, [&](const VarSet& z) {
                        const bool fast = d_separated(dag, x, y, z);
                        CHECK(fast == d_separated_bruteforce(dag, x, y, z));
                        CHECK(fast == d_separated(dag, y, x, z));
                        if (adjacent) CHECK_FALSE(fast);
                        ++cases;
                        return false;
                    });
                }
            }
        }
    }
    CHECK(cases >= 500);
}

TEST_CASE("precondition and domain errors") {
    Dag dag = load("fig1.edges");
    auto kind = [&](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::usage;
    };
    CHECK(kind([&] { d_separated(dag, 0, 0, {}); }) == ErrorKind::contract);
    CHECK(kind([&] { d_separated(dag, 0, 1, {0}); }) == ErrorKind::contract);
    CHECK(kind([&] { d_separated(dag, 0, 9, {}); }) == ErrorKind::domain);
    CHECK(kind([&] { d_separated(dag, 0, 1, {9}); }) == ErrorKind::domain);
    CHECK(kind([&] { d_separated_bruteforce(dag, 0, 9, {}); }) == ErrorKind::domain);
}

TEST_CASE("path enumeration aborts past its limit") {
    // Dense layered graph with many simple paths between the ends.
    std::string text;
    for (int layer = 0; layer < 4; ++layer) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                text += "n" + std::to_string(layer * 3 + i) + " n" + std::to_string((layer + 1) * 3 + j) + "\n";
            }
        }
    }
    Dag dag = parse_edge_list(text);
    CHECK_THROWS_AS(d_separated_bruteforce(dag, id(dag, "n0"), id(dag, "n12"), {}, 5), Error);
    CHECK_FALSE(d_separated_bruteforce(dag, id(dag, "n0"), id(dag, "n12"), {}));
}
