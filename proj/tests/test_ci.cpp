#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsepcp/ci.hpp"
#include "dsepcp/dsep.hpp"
#include "dsepcp/errors.hpp"
#include "dsepcp/sem.hpp"
#include "support.hpp"

using namespace dsepcp;
using namespace testing;

namespace {

// Partial correlation from raw samples: residuals of x and y after least
// squares on [1, Z], then their Pearson correlation.
double residual_partial_correlation(const Dataset& data, Var x, Var y, const VarSet& z) {
    const Eigen::Index m = data.values.rows();
    Eigen::MatrixXd design(m, static_cast<Eigen::Index>(z.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < z.size(); ++k) design.col(static_cast<Eigen::Index>(k) + 1) = data.values.col(z[k]);
    auto residual = [&](Var v) {
        Eigen::VectorXd target = data.values.col(v);
        Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
        return Eigen::VectorXd(target - design * beta);
    };
    Eigen::VectorXd rx = residual(x), ry = residual(y);
    rx.array() -= rx.mean();
    ry.array() -= ry.mean();
    return rx.dot(ry) / std::sqrt(rx.squaredNorm() * ry.squaredNorm());
}

Dataset independent_uniforms(std::size_t m, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    for (std::size_t c = 0; c < cols; ++c) d.names.push_back("u" + std::to_string(c));
    d.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
        for (Eigen::Index c = 0; c < d.values.cols(); ++c) d.values(i, c) = rng.uniform(-1.0, 1.0);
    }
    return d;
}

Dataset chain_data(std::size_t m, std::uint64_t seed) {
    Dag dag = parse_edge_list("a b\nb c");
    return sample_linear_sem(make_sem_spec(dag, seed), m, seed);
}

}  // namespace

TEST_CASE("oracle answers d-separation and counts every call") {
    Dag dag = load("fig1.edges");
    OracleTester t(dag);
    CHECK(t.num_variables() == 5);
    CHECK(t.independent(id(dag, "3"), id(dag, "5"), ids(dag, {"4"})));
    CHECK(t.independent(id(dag, "5"), id(dag, "3"), ids(dag, {"4"})));
    CHECK_FALSE(t.independent(id(dag, "1"), id(dag, "3"), ids(dag, {"2"})));
    CHECK(t.total_tests() == 3);
    CHECK(t.refining_tests() == 0);
    {
        auto scope = t.refining();
        t.independent(id(dag, "1"), id(dag, "3"), VarSet{});
        {
            auto inner = t.refining();
            t.independent(id(dag, "1"), id(dag, "3"), VarSet{});
        }
    }
    t.independent(id(dag, "1"), id(dag, "3"), VarSet{});
    CHECK(t.total_tests() == 6);
    CHECK(t.refining_tests() == 2);
}

TEST_CASE("oracle never separates adjacent pairs") {
    Dag dag = load("fig2.edges");
    OracleTester t(dag);
    const VarSet all = iota_varset(dag.size());
    for (auto [a, b] : dag.edges()) {
        for (std::size_t k = 0; k <= 3; ++k) {
            for_each_subset(without(all, {a, b}), k, [&](const VarSet& z) {
                CHECK_FALSE(t.independent(a, b, z));
                return false;
            });
        }
    }
}

TEST_CASE("subset enumeration order") {
    std::vector<VarSet> seen;
    for_each_subset(VarSet{1, 2, 3, 4}, 2, [&](const VarSet& z) {
        seen.push_back(z);
        return false;
    });
    CHECK(seen == std::vector<VarSet>{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    int empties = 0;
    for_each_subset(VarSet{1, 2}, 0, [&](const VarSet& z) {
        empties += z.empty() ? 1 : 0;
        return false;
    });
    CHECK(empties == 1);
    CHECK_FALSE(for_each_subset(VarSet{1}, 2, [](const VarSet&) { return true; }));
}

TEST_CASE("separating-set search") {
    Dag dag = load("fig1.edges");
    OracleTester t(dag);
    auto z = exhaustive_sepset_search(t, id(dag, "1"), id(dag, "5"), ids(dag, {"2", "3", "4"}), 1);
    REQUIRE(z);
    CHECK(*z == ids(dag, {"4"}));

    CHECK_FALSE(exhaustive_sepset_search(t, id(dag, "3"), id(dag, "4"), ids(dag, {"1", "2", "5"}), 3));

    const auto before = t.total_tests();
    auto empty = exhaustive_sepset_search(t, id(dag, "1"), id(dag, "3"), ids(dag, {"2", "4", "5"}), 2);
    REQUIRE(empty);
    CHECK(empty->empty());
    CHECK(t.total_tests() - before == 1);

    Dag fig2 = load("fig2.edges");
    OracleTester t2(fig2);
    auto bounded = find_separating_set(t2, id(fig2, "3"), id(fig2, "6"), ids(fig2, {"8"}), 1, 2);
    REQUIRE(bounded);
    CHECK(*bounded == ids(fig2, {"8"}));
    CHECK(exhaustive_sepset_search(t2, id(fig2, "3"), id(fig2, "6"), ids(fig2, {"8"}), 2)->empty());
}

TEST_CASE("found separating sets verify") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dag dag = random_dag(9, 1.5, seed);
        OracleTester t(dag);
        for (auto [x, y] : nonadjacent_pairs(dag)) {
            auto z = exhaustive_sepset_search(t, x, y, without(iota_varset(9), {x, y}), 3);
            if (z) CHECK(d_separated(dag, x, y, *z));
        }
    }
}

TEST_CASE("sepset cache keeps the first witness, unordered") {
    SepsetCache cache;
    cache.insert(4, 2, {1});
    cache.insert(2, 4, {3});
    REQUIRE(cache.find(2, 4));
    CHECK(*cache.find(2, 4) == VarSet{1});
    CHECK(*cache.find(4, 2) == VarSet{1});
    CHECK_FALSE(cache.find(1, 2));
    SepsetCache other;
    other.insert(1, 2, {});
    other.insert(2, 4, {7});
    cache.merge_from(other);
    CHECK(cache.size() == 2);
    CHECK(*cache.find(2, 4) == VarSet{1});
}

TEST_CASE("fisher z critical value and decision rule") {
    Dataset d = independent_uniforms(200, 3, 5);
    FisherZTester t(d, 0.05);
    CHECK(t.critical_value() == doctest::Approx(1.959963985).epsilon(1e-9));
    CHECK(FisherZTester(d, 0.01).critical_value() == doctest::Approx(2.575829304).epsilon(1e-9));

    auto rho = t.partial_correlation(0, 1, VarSet{2});
    REQUIRE(rho);
    const double stat = std::sqrt(200.0 - 1 - 3) * std::atanh(std::abs(*rho));
    CHECK(t.independent(0, 1, VarSet{2}) == (stat <= t.critical_value()));
}

TEST_CASE("partial correlation matches residual regression") {
    Dataset d = sample_linear_sem(make_sem_spec(load("asia.edges"), 11), 400, 11);
    FisherZTester t(d, 0.05);
    const std::vector<std::pair<Edge, VarSet>> queries{
        {{0, 1}, {}}, {{0, 3}, {1}}, {{2, 7}, {4, 5}}, {{1, 6}, {0, 3, 5}}, {{3, 4}, {2}}};
    for (const auto& [pair, z] : queries) {
        auto rho = t.partial_correlation(pair.first, pair.second, z);
        REQUIRE(rho);
        CHECK(*rho == doctest::Approx(residual_partial_correlation(d, pair.first, pair.second, z)).epsilon(1e-9));
    }
}

TEST_CASE("fisher z null calibration") {
    // 1000 independent trials, each a fresh pair of independent columns.
    int rejections = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        FisherZTester t(independent_uniforms(200, 2, 9000 + i), 0.05);
        rejections += t.independent(0, 1, VarSet{}) ? 0 : 1;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("fisher z under the null at m = 5000") {
    int accepted = 0;
    for (int i = 0; i < 200; ++i) {
        FisherZTester t(independent_uniforms(5000, 2, 100 + i), 0.05);
        accepted += t.independent(0, 1, VarSet{}) ? 1 : 0;
    }
    CHECK(accepted >= 180);
}

TEST_CASE("fisher z on a chain") {
    FisherZTester t(chain_data(5000, 4), 0.05);
    CHECK(t.independent(0, 2, VarSet{1}));
    CHECK_FALSE(t.independent(0, 2, VarSet{}));
    CHECK_FALSE(t.independent(0, 1, VarSet{2}));
}

TEST_CASE("identical columns are dependent; singular sets are flagged") {
    Dataset d = independent_uniforms(300, 3, 2);
    d.values.col(1) = d.values.col(0);
    FisherZTester t(d, 0.05);
    CHECK_FALSE(t.independent(0, 1, VarSet{}));
    CHECK_FALSE(t.independent(0, 1, VarSet{2}));

    Dataset s = independent_uniforms(300, 3, 3);
    s.values.col(2) = s.values.col(0);
    FisherZTester singular(s, 0.05);
    CHECK_FALSE(singular.partial_correlation(0, 1, VarSet{2}));
    CHECK_FALSE(singular.independent(0, 1, VarSet{2}));
    CHECK(singular.singular_count() == 1);
}

TEST_CASE("too few samples for the conditioning set") {
    Dataset d = independent_uniforms(5, 4, 1);
    FisherZTester t(d, 0.05);
    CHECK_NOTHROW(t.independent(0, 1, VarSet{2}));
    try {
        t.independent(0, 1, VarSet{2, 3});
        FAIL("accepted m <= |Z| + 3");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::contract);
    }
    CHECK_THROWS_AS(FisherZTester(d, 0.0), Error);
    CHECK_THROWS_AS(FisherZTester(d, 1.0), Error);
}
