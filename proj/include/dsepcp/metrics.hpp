#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "dsepcp/graph.hpp"

namespace dsepcp {

/// Skeleton agreement with the true graph. Ratios with a zero denominator
/// are reported as 0.
struct QualityScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
};

QualityScores skeleton_scores(const CausalGraph& predicted, const Dag& truth);

/// Share of refinement tests that went to false edges: F / (F + T), or 0.
double hit_rate(std::uint64_t false_edge_tests, std::uint64_t non_false_tests);

/// Mean with a 95% normal-approximation confidence half-width,
/// 1.96 * s / sqrt(n) using the sample standard deviation.
struct AggregateStat {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t reps = 0;
};

AggregateStat aggregate(std::span<const double> values);

}  // namespace dsepcp
