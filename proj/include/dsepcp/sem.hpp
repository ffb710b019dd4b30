#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsepcp/graph.hpp"

namespace dsepcp {

/// Portable seedable generator: mt19937_64 seeded through splitmix64, with
/// uniform doubles built from the top 53 bits so results do not depend on
/// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    /// Independent stream `stream` derived from `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next();
    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// m x n samples, one column per variable.
struct Dataset {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    std::size_t samples() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t variables() const { return static_cast<std::size_t>(values.cols()); }
};

enum class NoiseKind { uniform };

/// Linear SEM v_i = sum_j w_ji v_j + r e_i with unit-variance noise.
struct SemSpec {
    Dag dag;
    /// weights[i][k] multiplies parent dag.parents(i)[k].
    std::vector<std::vector<double>> weights;
    double noise_scale = 0.3;
    NoiseKind noise = NoiseKind::uniform;
};

/// Throws a contract error unless every non-root weight vector sums to one
/// and the noise scale is positive.
void validate(const SemSpec& spec);

/// Draws per-edge weights uniform on (0.2, 1) and normalizes them per child.
SemSpec make_sem_spec(Dag dag, std::uint64_t seed, double noise_scale = 0.3);

/// Node t (1-based, t >= 2) becomes a parent of each earlier node with
/// probability min(1, avg_children / (t - 1)). Nodes are named "1".."n".
Dag random_dag(std::size_t n, double avg_children, std::uint64_t seed);

Dataset sample_linear_sem(const SemSpec& spec, std::size_t m, std::uint64_t seed);

/// Centers each column and scales it to unit population variance.
Dataset standardize(Dataset data);

std::string format_csv(const Dataset& data);
Dataset parse_csv(const std::string& text);
Dataset read_csv_file(const std::string& path);

}  // namespace dsepcp
