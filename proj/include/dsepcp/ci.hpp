#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dsepcp/graph.hpp"

namespace dsepcp {

struct Dataset;

/// Witnessing conditioning sets for separated pairs, keyed by unordered pair.
class SepsetCache {
public:
    /// Keeps the first set recorded for a pair.
    void insert(Var x, Var y, VarSet z);
    std::optional<VarSet> find(Var x, Var y) const;
    void merge_from(const SepsetCache& other);
    std::size_t size() const noexcept { return sets_.size(); }

private:
    std::map<Edge, VarSet> sets_;
};

/// Conditional-independence test with test counters.
///
/// Every call to `independent` counts once towards `total_tests`; calls made
/// while a `RefiningScope` is alive also count towards `refining_tests`.
class CiTester {
public:
    virtual ~CiTester() = default;

    bool independent(Var x, Var y, std::span<const Var> z);
    bool independent(Var x, Var y, const VarSet& z) {
        return independent(x, y, std::span<const Var>(z));
    }

    /// Number of variables the tester can answer queries about.
    virtual std::size_t num_variables() const = 0;

    std::uint64_t total_tests() const noexcept { return total_; }
    std::uint64_t refining_tests() const noexcept { return refining_; }

    class RefiningScope {
    public:
        explicit RefiningScope(CiTester& tester) : tester_(&tester) { ++tester_->refining_depth_; }
        RefiningScope(const RefiningScope&) = delete;
        RefiningScope& operator=(const RefiningScope&) = delete;
        ~RefiningScope() { --tester_->refining_depth_; }

    private:
        CiTester* tester_;
    };

    RefiningScope refining() { return RefiningScope(*this); }

protected:
    /// Called with x < y.
    virtual bool test(Var x, Var y, std::span<const Var> z) = 0;

private:
    std::uint64_t total_ = 0;
    std::uint64_t refining_ = 0;
    int refining_depth_ = 0;
};

/// Answers queries by d-separation in a known DAG.
class OracleTester final : public CiTester {
public:
    explicit OracleTester(std::shared_ptr<const Dag> dag);
    explicit OracleTester(const Dag& dag) : OracleTester(std::make_shared<const Dag>(dag)) {}

    std::size_t num_variables() const override { return dag_->size(); }

protected:
    bool test(Var x, Var y, std::span<const Var> z) override;

private:
    std::shared_ptr<const Dag> dag_;
};

/// Sample correlation matrix of a dataset; immutable and shareable.
struct CorrelationMatrix {
    Eigen::MatrixXd values;
    std::size_t samples = 0;

    static std::shared_ptr<const CorrelationMatrix> of(const Dataset& data);
};

/// Partial-correlation test with the Fisher z transform.
class FisherZTester final : public CiTester {
public:
    FisherZTester(std::shared_ptr<const CorrelationMatrix> corr, double alpha);
    FisherZTester(const Dataset& data, double alpha);

    std::size_t num_variables() const override;
    double alpha() const noexcept { return alpha_; }
    double critical_value() const noexcept { return critical_; }

    /// Partial correlation of x and y given z, or nullopt when the
    /// correlation submatrix is singular.
    std::optional<double> partial_correlation(Var x, Var y, std::span<const Var> z) const;

    /// Queries whose correlation submatrix could not be inverted. Such
    /// queries are answered "dependent".
    std::uint64_t singular_count() const noexcept { return singular_; }

protected:
    bool test(Var x, Var y, std::span<const Var> z) override;

private:
    std::shared_ptr<const CorrelationMatrix> corr_;
    double alpha_;
    double critical_;
    std::uint64_t singular_ = 0;
};

/// Visits the size-k subsets of `items` in lexicographic order of positions.
/// Stops and returns true as soon as `visit` returns true.
template <typename Visit>
bool for_each_subset(const VarSet& items, std::size_t k, Visit&& visit) {
    if (k > items.size()) return false;
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[i] = i;
    VarSet subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[pos[i]];
        if (visit(static_cast<const VarSet&>(subset))) return true;
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == items.size() - k + (i - 1)) --i;
        if (i == 0) return false;
        ++pos[i - 1];
        for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

/// First Z subset of `candidates` with min_size <= |Z| <= max_size that
/// separates x and y, trying sizes in ascending order.
std::optional<VarSet> find_separating_set(CiTester& tester, Var x, Var y,
                                          const VarSet& candidates, std::size_t min_size,
                                          std::size_t max_size);

inline std::optional<VarSet> exhaustive_sepset_search(CiTester& tester, Var x, Var y,
                                                      const VarSet& candidates,
                                                      std::size_t max_order) {
    return find_separating_set(tester, x, y, candidates, 0, max_order);
}

}  // namespace dsepcp
