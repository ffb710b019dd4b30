#include "dsepcp/metrics.hpp"

#include <cmath>

#include "dsepcp/errors.hpp"

namespace dsepcp {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

QualityScores skeleton_scores(const CausalGraph& predicted, const Dag& truth) {
    if (predicted.universe() != truth.size()) {
        throw Error(ErrorKind::contract, "prediction and truth use different variable sets");
    }
    const CausalGraph expected = CausalGraph::skeleton_of(truth);
    QualityScores s;
    for (auto [a, b] : predicted.skeleton_edges()) {
        if (expected.adjacent(a, b)) {
            ++s.true_positives;
        } else {
            ++s.false_positives;
        }
    }
    s.false_negatives = expected.skeleton_edges().size() - s.true_positives;
    s.precision = ratio(s.true_positives, s.true_positives + s.false_positives);
    s.recall = ratio(s.true_positives, s.true_positives + s.false_negatives);
    const double sum = s.precision + s.recall;
    s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
    return s;
}

double hit_rate(std::uint64_t false_edge_tests, std::uint64_t non_false_tests) {
    const std::uint64_t total = false_edge_tests + non_false_tests;
    return total == 0 ? 0.0 : static_cast<double>(false_edge_tests) / static_cast<double>(total);
}

AggregateStat aggregate(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorKind::contract, "aggregate needs at least two values");
    }
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n), values.size()};
}

}  // namespace dsepcp
