#include "dsepcp/ci.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "dsepcp/dsep.hpp"
#include "dsepcp/errors.hpp"
#include "dsepcp/sem.hpp"

namespace dsepcp {

void SepsetCache::insert(Var x, Var y, VarSet z) {
    sets_.emplace(Edge{std::min(x, y), std::max(x, y)}, std::move(z));
}

std::optional<VarSet> SepsetCache::find(Var x, Var y) const {
    auto it = sets_.find(Edge{std::min(x, y), std::max(x, y)});
    if (it == sets_.end()) return std::nullopt;
    return it->second;
}

void SepsetCache::merge_from(const SepsetCache& other) {
    for (const auto& [pair, z] : other.sets_) sets_.emplace(pair, z);
}

bool CiTester::independent(Var x, Var y, std::span<const Var> z) {
    ++total_;
    if (refining_depth_ > 0) ++refining_;
    if (x > y) std::swap(x, y);
    return test(x, y, z);
}

OracleTester::OracleTester(std::shared_ptr<const Dag> dag) : dag_(std::move(dag)) {}

bool OracleTester::test(Var x, Var y, std::span<const Var> z) {
    return d_separated(*dag_, x, y, make_varset({z.begin(), z.end()}));
}

std::shared_ptr<const CorrelationMatrix> CorrelationMatrix::of(const Dataset& data) {
    const auto m = data.values.rows();
    if (m < 2) throw Error(ErrorKind::contract, "correlation needs at least 2 samples");
    Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();
    // Sample covariance (m - 1); the divisor cancels in the correlation.
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
    Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    auto out = std::make_shared<CorrelationMatrix>();
    out->values = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    out->samples = static_cast<std::size_t>(m);
    return out;
}

FisherZTester::FisherZTester(std::shared_ptr<const CorrelationMatrix> corr, double alpha)
    : corr_(std::move(corr)), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::domain, "alpha must lie in (0, 1)");
    }
    critical_ = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
}

FisherZTester::FisherZTester(const Dataset& data, double alpha)
    : FisherZTester(CorrelationMatrix::of(data), alpha) {}

std::size_t FisherZTester::num_variables() const {
    return static_cast<std::size_t>(corr_->values.rows());
}

std::optional<double> FisherZTester::partial_correlation(Var x, Var y,
                                                         std::span<const Var> z) const {
    const auto& r = corr_->values;
    if (z.empty()) return r(x, y);

    const auto k = static_cast<Eigen::Index>(z.size() + 2);
    std::vector<Var> idx{x, y};
    idx.insert(idx.end(), z.begin(), z.end());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = r(idx[i], idx[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12) {
        return std::nullopt;
    }
    Eigen::MatrixXd precision = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    return -precision(0, 1) / std::sqrt(precision(0, 0) * precision(1, 1));
}

bool FisherZTester::test(Var x, Var y, std::span<const Var> z) {
    const auto m = static_cast<double>(corr_->samples);
    if (m <= static_cast<double>(z.size()) + 3.0) {
        throw Error(ErrorKind::contract, "too few samples for conditioning set of size " +
                                             std::to_string(z.size()));
    }
    auto rho = partial_correlation(x, y, z);
    if (!rho) {
        ++singular_;
        return false;
    }
    const double abs_rho = std::abs(*rho);
    if (!(abs_rho < 1.0)) return false;
    const double stat = std::sqrt(m - static_cast<double>(z.size()) - 3.0) * std::atanh(abs_rho);
    return stat <= critical_;
}

std::optional<VarSet> find_separating_set(CiTester& tester, Var x, Var y,
                                          const VarSet& candidates, std::size_t min_size,
                                          std::size_t max_size) {
    std::optional<VarSet> found;
    const std::size_t top = std::min(max_size, candidates.size());
    for (std::size_t k = min_size; k <= top && !found; ++k) {
        for_each_subset(candidates, k, [&](const VarSet& z) {
            if (tester.independent(x, y, z)) found = z;
            return found.has_value();
        });
    }
    return found;
}

}  // namespace dsepcp
