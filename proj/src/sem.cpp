#include "dsepcp/sem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsepcp/errors.hpp"

namespace dsepcp {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed) ^ splitmix64(~stream));
}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

void validate(const SemSpec& spec) {
    if (!(spec.noise_scale > 0.0)) {
        throw Error(ErrorKind::contract, "noise scale must be positive");
    }
    if (spec.weights.size() != spec.dag.size()) {
        throw Error(ErrorKind::contract, "one weight vector per variable required");
    }
    for (Var v = 0; v < static_cast<Var>(spec.dag.size()); ++v) {
        const auto& w = spec.weights[v];
        if (w.size() != spec.dag.parents(v).size()) {
            throw Error(ErrorKind::contract, "weight count differs from parent count");
        }
        if (w.empty()) continue;
        double sum = 0.0;
        for (double x : w) sum += x;
        if (std::abs(sum - 1.0) > 1e-9) {
            throw Error(ErrorKind::contract,
                        "weights into '" + spec.dag.name(v) + "' do not sum to 1");
        }
    }
}

SemSpec make_sem_spec(Dag dag, std::uint64_t seed, double noise_scale) {
    SemSpec spec;
    spec.weights.resize(dag.size());
    for (Var v = 0; v < static_cast<Var>(dag.size()); ++v) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(v));
        auto& w = spec.weights[v];
        double sum = 0.0;
        for (std::size_t k = 0; k < dag.parents(v).size(); ++k) {
            // (0.2, 1): reject the closed endpoint.
            double x;
            do {
                x = rng.uniform(0.2, 1.0);
            } while (x <= 0.2);
            w.push_back(x);
            sum += x;
        }
        for (double& x : w) x /= sum;
    }
    spec.dag = std::move(dag);
    spec.noise_scale = noise_scale;
    validate(spec);
    return spec;
}

Dag random_dag(std::size_t n, double avg_children, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorKind::domain, "random_dag needs n >= 1");
    std::vector<std::string> names;
    std::vector<Edge> edges;
    names.reserve(n);
    for (std::size_t t = 1; t <= n; ++t) names.push_back(std::to_string(t));
    for (std::size_t t = 2; t <= n; ++t) {
        Rng rng = Rng::stream(seed, t);
        const double p = std::min(1.0, avg_children / static_cast<double>(t - 1));
        for (std::size_t prev = 1; prev < t; ++prev) {
            if (rng.uniform() < p) {
                edges.emplace_back(static_cast<Var>(t - 1), static_cast<Var>(prev - 1));
            }
        }
    }
    return Dag(std::move(names), edges);
}

Dataset sample_linear_sem(const SemSpec& spec, std::size_t m, std::uint64_t seed) {
    if (m < 2) throw Error(ErrorKind::contract, "sampling needs m >= 2");
    validate(spec);
    const auto n = static_cast<Eigen::Index>(spec.dag.size());
    const auto rows = static_cast<Eigen::Index>(m);
    Dataset data;
    data.names = spec.dag.names();
    data.values.resize(rows, n);

    const double half_width = std::sqrt(3.0);  // uniform[-sqrt3, sqrt3]: mean 0, var 1
    for (Var v : spec.dag.topological_order()) {
        // Noise streams live above the weight streams of make_sem_spec.
        Rng rng = Rng::stream(seed, (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(v));
        auto col = data.values.col(v);
        for (Eigen::Index i = 0; i < rows; ++i) {
            col(i) = spec.noise_scale * rng.uniform(-half_width, half_width);
        }
        const auto& parents = spec.dag.parents(v);
        for (std::size_t k = 0; k < parents.size(); ++k) {
            col += spec.weights[v][k] * data.values.col(parents[k]);
        }
    }
    return standardize(std::move(data));
}

Dataset standardize(Dataset data) {
    const auto m = static_cast<double>(data.values.rows());
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
        auto col = data.values.col(j);
        const double mean = col.mean();
        col.array() -= mean;
        const double var = col.squaredNorm() / m;
        if (!(var > 1e-24)) {
            const std::string name =
                static_cast<std::size_t>(j) < data.names.size() ? data.names[j] : std::to_string(j);
            throw Error(ErrorKind::generation, "column '" + name + "' has zero variance");
        }
        col /= std::sqrt(var);
    }
    return data;
}

std::string format_csv(const Dataset& data) {
    std::string out;
    for (std::size_t j = 0; j < data.names.size(); ++j) {
        if (j) out += ',';
        out += data.names[j];
    }
    out += '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
            if (j) out += ',';
            // Shortest round-trip representation, locale independent.
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, data.values(i, j));
            out.append(buf, end);
        }
        out += '\n';
    }
    return out;
}

Dataset parse_csv(const std::string& text) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::parse, "empty CSV");
    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(s);
        while (std::getline(ls, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
        }
        return fields;
    };
    data.names = split(line);
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != data.names.size()) {
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(data.names.size()) + " fields");
        }
        for (const auto& f : fields) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            if (ec != std::errc() || ptr != f.data() + f.size()) {
                throw Error(ErrorKind::parse,
                            "line " + std::to_string(line_no) + ": bad number '" + f + "'");
            }
            values.push_back(x);
        }
        ++rows;
    }
    const auto n = static_cast<Eigen::Index>(data.names.size());
    data.values.resize(static_cast<Eigen::Index>(rows), n);
    for (std::size_t i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            data.values(static_cast<Eigen::Index>(i), j) = values[i * data.names.size() + j];
        }
    }
    return data;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

}  // namespace dsepcp
