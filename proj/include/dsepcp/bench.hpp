#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsepcp/discovery.hpp"
#include "dsepcp/metrics.hpp"

namespace dsepcp {

/// One network entry of a plan: an edge-list file or a random DAG size.
struct NetworkSpec {
    std::string label;
    std::string path;            // empty for random networks
    std::size_t random_nodes = 0;
};

/// Experiment grid read from a plan file.
///
/// Grammar: one `key = value` per line, '#' starts a comment, list values are
/// comma separated. Keys: algorithms, networks, nodes, samples, reps, seed,
/// mode, alpha, k_thresh, thresh_size (an integer or "auto"),
/// avg_children, inclusive_bound (true/false), jobs, out.
/// Relative network paths resolve against the plan file's directory.
struct BenchPlan {
    std::vector<Algorithm> algorithms{Algorithm::dsep_cp, Algorithm::cp};
    std::vector<NetworkSpec> networks;
    std::vector<std::size_t> sample_sizes{500};
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    TestMode mode = TestMode::statistical;
    double alpha = 0.05;
    std::size_t k_thresh = 3;
    std::optional<std::size_t> thresh_size;  // nullopt: max(floor(n/10), 3)
    double avg_children = 1.5;
    bool inclusive_bound = false;
    std::size_t jobs = 1;
    std::string out = "bench-out";

    /// Throws unless reps >= 1, at least one network and algorithm are
    /// given, and every referenced file exists.
    void validate() const;
};

BenchPlan parse_bench_plan(const std::string& text, const std::string& base_dir = ".");
BenchPlan read_bench_plan_file(const std::string& path);

struct BenchRow {
    Algorithm algorithm = Algorithm::dsep_cp;
    std::string network;
    std::size_t nodes = 0;
    std::size_t sample_size = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    QualityScores scores;
    std::size_t edges = 0;
    std::uint64_t total_ci_tests = 0;
    std::uint64_t refining_ci_tests = 0;
    std::size_t refined_edges = 0;
    std::size_t examined_edges = 0;
    double total_seconds = 0.0;
    double refining_seconds = 0.0;
    bool ok = true;
    std::string error;
};

/// Runs every (network, sample size, rep) cell, each with all algorithms on
/// the same true graph and data. Cells run on up to `jobs` threads; rows
/// come back in grid order regardless of scheduling.
std::vector<BenchRow> run_bench(const BenchPlan& plan);

struct AggregateRow {
    Algorithm algorithm = Algorithm::dsep_cp;
    std::string network;
    std::size_t sample_size = 0;
    std::size_t reps = 0;
    bool ci_available = false;
    AggregateStat f1, precision, recall, refining_ci_tests, total_ci_tests, total_seconds;
};

/// Groups successful rows by (algorithm, network, sample size). With a
/// single rep the mean is reported and the interval is flagged unavailable.
std::vector<AggregateRow> aggregate_rows(const std::vector<BenchRow>& rows);

std::string format_runs_csv(const std::vector<BenchRow>& rows);
std::string format_aggregate_csv(const std::vector<AggregateRow>& rows);

/// Seed of a plan cell; the same for every algorithm run on that cell.
std::uint64_t cell_seed(std::uint64_t plan_seed, std::size_t network, std::size_t sample_size,
                        std::size_t rep);

nlohmann::json report_to_json(const RunReport& report, std::uint64_t seed, std::size_t n,
                              std::size_t m, const std::optional<QualityScores>& scores = {});

}  // namespace dsepcp
