#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsepcp/bench.hpp"
#include "dsepcp/discovery.hpp"
#include "dsepcp/errors.hpp"
#include "dsepcp/metrics.hpp"
#include "dsepcp/sem.hpp"

namespace fs = std::filesystem;
using namespace dsepcp;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return 2;
        case ErrorKind::parse: return 3;
        case ErrorKind::structure: return 4;
        case ErrorKind::domain: return 5;
        case ErrorKind::contract: return 6;
        case ErrorKind::generation: return 7;
        case ErrorKind::io: return 8;
    }
    return 1;
}

void report_error(std::string_view kind, std::string_view message) {
    nlohmann::json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

// Reorders a ground-truth DAG so its variable indices follow `names`.
Dag align_to(const Dag& dag, const std::vector<std::string>& names) {
    if (dag.names() == names) return dag;
    if (dag.size() != names.size()) {
        throw Error(ErrorKind::usage, "--dag variables do not match the dataset columns");
    }
    std::vector<Edge> edges;
    for (auto [from, to] : dag.edges()) {
        Var a = -1, b = -1;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == dag.name(from)) a = static_cast<Var>(i);
            if (names[i] == dag.name(to)) b = static_cast<Var>(i);
        }
        if (a < 0 || b < 0) throw Error(ErrorKind::usage, "--dag variables do not match the dataset columns");
        edges.emplace_back(a, b);
    }
    return Dag(names, edges);
}

struct GenArgs {
    std::size_t n = 0;
    double avg_children = 1.5;
    std::uint64_t seed = 1;
    std::string out;
};

struct SampleArgs {
    std::string dag;
    std::size_t m = 500;
    std::uint64_t seed = 1;
    double noise_scale = 0.3;
    std::string out;
};

struct DiscoverArgs {
    std::string algo = "dsep-cp";
    std::string mode = "statistical";
    std::string dag;
    std::string data;
    double alpha = 0.05;
    std::size_t k_thresh = 3;
    std::optional<std::size_t> thresh_size;
    bool inclusive_bound = false;
    bool zero_rows = false;
    std::uint64_t seed = 0;
    std::string out = "discover-out";
};

struct BenchArgs {
    std::string plan;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
};

void run_gen(const GenArgs& args) {
    if (args.n == 0) throw Error(ErrorKind::usage, "--n must be at least 1");
    write_file(args.out, format_edge_list(random_dag(args.n, args.avg_children, args.seed)));
}

void run_sample(const SampleArgs& args) {
    Dag dag = read_edge_list_file(args.dag);
    SemSpec spec = make_sem_spec(std::move(dag), args.seed, args.noise_scale);
    write_file(args.out, format_csv(sample_linear_sem(spec, args.m, args.seed)));
}

void run_discover(const DiscoverArgs& args) {
    DiscoveryConfig config;
    config.algorithm = parse_algorithm(args.algo);
    config.mode = parse_test_mode(args.mode);
    config.alpha = args.alpha;
    config.k_thresh = args.k_thresh;
    config.inclusive_refine_bound = args.inclusive_bound;
    config.zero_rows = args.zero_rows;

    std::optional<Dag> truth;
    std::unique_ptr<CiTester> tester;
    std::vector<std::string> names;
    std::size_t m = 0;
    if (config.mode == TestMode::oracle) {
        if (args.dag.empty()) throw Error(ErrorKind::usage, "oracle mode requires --dag");
        if (!args.data.empty()) throw Error(ErrorKind::usage, "oracle mode does not read --data");
        truth = read_edge_list_file(args.dag);
        names = truth->names();
        tester = std::make_unique<OracleTester>(*truth);
    } else {
        if (args.data.empty()) throw Error(ErrorKind::usage, "statistical mode requires --data");
        Dataset data = read_csv_file(args.data);
        names = data.names;
        m = static_cast<std::size_t>(data.values.rows());
        if (!args.dag.empty()) truth = align_to(read_edge_list_file(args.dag), names);
        tester = std::make_unique<FisherZTester>(CorrelationMatrix::of(data), config.alpha);
    }
    config.graph_thresh_size = args.thresh_size.value_or(DiscoveryConfig::default_thresh_size(names.size()));
    config.validate();

    RunReport report = run_discovery(iota_varset(names.size()), *tester, config);
    std::optional<QualityScores> scores;
    if (truth) scores = skeleton_scores(report.graph, *truth);

    const fs::path out(args.out);
    write_file(out / "report.json", report_to_json(report, args.seed, names.size(), m, scores).dump(2) + "\n");
    write_file(out / "skeleton.edges", format_skeleton(report.graph, names));
    std::cout << "edges " << report.graph.edge_count() << ", CI tests " << report.total_ci_tests
              << " (refining " << report.refining_ci_tests << "), wrote " << out.string() << '\n';
}

void run_bench_cmd(const BenchArgs& args) {
    BenchPlan plan = read_bench_plan_file(args.plan);
    if (args.jobs) plan.jobs = *args.jobs;
    if (args.out) plan.out = *args.out;
    plan.validate();
    const auto rows = run_bench(plan);
    const auto aggregated = aggregate_rows(rows);
    const fs::path out(plan.out);
    write_file(out / "runs.csv", format_runs_csv(rows));
    write_file(out / "aggregate.csv", format_aggregate_csv(aggregated));
    std::size_t failed = 0;
    for (const auto& row : rows) failed += row.ok ? 0 : 1;
    std::cout << rows.size() << " runs (" << failed << " failed), wrote " << out.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal skeleton discovery by divide-and-conquer with gated refinement"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a random DAG as an edge list");
    gen_cmd->add_option("--n", gen.n, "Number of nodes")->required();
    gen_cmd->add_option("--avg-children", gen.avg_children, "Expected children per node");
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Output edge-list file")->required();

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Sample a linear non-Gaussian SEM to CSV");
    sample_cmd->add_option("--dag", sample.dag, "Edge-list file")->required();
    sample_cmd->add_option("--m", sample.m, "Number of samples");
    sample_cmd->add_option("--seed", sample.seed, "Random seed");
    sample_cmd->add_option("--noise-scale", sample.noise_scale, "Noise scale r");
    sample_cmd->add_option("--out", sample.out, "Output CSV file")->required();

    DiscoverArgs discover;
    auto* discover_cmd = app.add_subcommand("discover", "Recover a causal skeleton");
    discover_cmd->add_option("--algo", discover.algo, "pc, cp or dsep-cp");
    discover_cmd->add_option("--mode", discover.mode, "oracle or statistical");
    discover_cmd->add_option("--dag", discover.dag, "True graph (oracle tests or scoring)");
    discover_cmd->add_option("--data", discover.data, "Dataset CSV (statistical mode)");
    discover_cmd->add_option("--alpha", discover.alpha, "Significance level");
    discover_cmd->add_option("--k-thresh", discover.k_thresh, "Conditioning-set size cap");
    discover_cmd->add_option("--thresh-size", discover.thresh_size, "Base-case size (default max(n/10, 3))");
    discover_cmd->add_flag("--inclusive-bound", discover.inclusive_bound, "Refine with |Z| <= k_thresh");
    discover_cmd->add_flag("--zero-rows", discover.zero_rows, "Zero rows as well as columns when partitioning");
    discover_cmd->add_option("--seed", discover.seed, "Seed recorded in the report");
    discover_cmd->add_option("--out", discover.out, "Output directory");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run an experiment plan");
    bench_cmd->add_option("--plan", bench.plan, "Plan file")->required();
    bench_cmd->add_option("--jobs", bench.jobs, "Worker threads");
    bench_cmd->add_option("--out", bench.out, "Output directory (overrides the plan)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return exit_code(ErrorKind::usage);
    }

    try {
        if (*gen_cmd) run_gen(gen);
        if (*sample_cmd) run_sample(sample);
        if (*discover_cmd) run_discover(discover);
        if (*bench_cmd) run_bench_cmd(bench);
    } catch (const Error& e) {
        report_error(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 1;
    }
    return 0;
}
