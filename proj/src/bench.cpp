#include "dsepcp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "dsepcp/errors.hpp"
#include "dsepcp/sem.hpp"

namespace dsepcp {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    for (std::string item; std::getline(in, item, ',');) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::parse, "plan key '" + key + "': bad number '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(ErrorKind::parse, "plan key '" + key + "': expected true or false");
}

}  // namespace

BenchPlan parse_bench_plan(const std::string& text, const std::string& base_dir) {
    BenchPlan plan;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::parse, "plan line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "algorithms") {
            plan.algorithms.clear();
            for (const auto& a : split_list(value)) plan.algorithms.push_back(parse_algorithm(a));
        } else if (key == "networks") {
            for (const auto& p : split_list(value)) {
                fs::path path(p);
                if (path.is_relative()) path = fs::path(base_dir) / path;
                plan.networks.push_back({fs::path(p).stem().string(), path.string(), 0});
            }
        } else if (key == "nodes") {
            for (const auto& n : split_list(value)) {
                const auto nodes = parse_number<std::size_t>(n, key);
                plan.networks.push_back({"random-" + n, "", nodes});
            }
        } else if (key == "samples") {
            plan.sample_sizes.clear();
            for (const auto& s : split_list(value)) plan.sample_sizes.push_back(parse_number<std::size_t>(s, key));
        } else if (key == "reps") {
            plan.reps = parse_number<std::size_t>(value, key);
        } else if (key == "seed") {
            plan.seed = parse_number<std::uint64_t>(value, key);
        } else if (key == "mode") {
            plan.mode = parse_test_mode(value);
        } else if (key == "alpha") {
            plan.alpha = parse_number<double>(value, key);
        } else if (key == "k_thresh") {
            plan.k_thresh = parse_number<std::size_t>(value, key);
        } else if (key == "thresh_size") {
            if (value == "auto") {
                plan.thresh_size.reset();
            } else {
                plan.thresh_size = parse_number<std::size_t>(value, key);
            }
        } else if (key == "avg_children") {
            plan.avg_children = parse_number<double>(value, key);
        } else if (key == "inclusive_bound") {
            plan.inclusive_bound = parse_bool(value, key);
        } else if (key == "jobs") {
            plan.jobs = parse_number<std::size_t>(value, key);
        } else if (key == "out") {
            plan.out = value;
        } else {
            throw Error(ErrorKind::parse, "plan line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return plan;
}

BenchPlan read_bench_plan_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open plan '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_bench_plan(buf.str(), fs::path(path).parent_path().string().empty()
                                           ? std::string(".")
                                           : fs::path(path).parent_path().string());
}

void BenchPlan::validate() const {
    if (reps < 1) throw Error(ErrorKind::contract, "plan needs reps >= 1");
    if (algorithms.empty()) throw Error(ErrorKind::contract, "plan lists no algorithms");
    if (networks.empty()) throw Error(ErrorKind::contract, "plan lists no networks or node counts");
    if (mode == TestMode::statistical && sample_sizes.empty()) {
        throw Error(ErrorKind::contract, "statistical plan lists no sample sizes");
    }
    for (const auto& net : networks) {
        if (net.path.empty()) {
            if (net.random_nodes == 0) throw Error(ErrorKind::contract, "random network needs nodes >= 1");
        } else if (!fs::exists(net.path)) {
            throw Error(ErrorKind::io, "network file '" + net.path + "' does not exist");
        }
    }
}

std::uint64_t cell_seed(std::uint64_t plan_seed, std::size_t network, std::size_t sample_size,
                        std::size_t rep) {
    std::uint64_t h = splitmix64(plan_seed);
    h = splitmix64(h ^ network);
    h = splitmix64(h ^ sample_size);
    return splitmix64(h ^ rep);
}

namespace {

struct Cell {
    std::size_t network;
    std::size_t sample_size;
    std::size_t rep;
};

std::vector<BenchRow> run_cell(const BenchPlan& plan, const Cell& cell,
                               const std::vector<std::optional<Dag>>& loaded) {
    const NetworkSpec& net = plan.networks[cell.network];
    const std::uint64_t seed = cell_seed(plan.seed, cell.network, cell.sample_size, cell.rep);
    std::vector<BenchRow> rows;
    for (Algorithm algorithm : plan.algorithms) {
        BenchRow row;
        row.algorithm = algorithm;
        row.network = net.label;
        row.sample_size = cell.sample_size;
        row.rep = cell.rep;
        row.seed = seed;
        rows.push_back(row);
    }
    try {
        // The random DAG depends on the rep but not on the sample size, so
        // one rep compares sample sizes on the same structure.
        const Dag dag = loaded[cell.network]
                            ? *loaded[cell.network]
                            : random_dag(net.random_nodes, plan.avg_children,
                                         cell_seed(plan.seed, cell.network, 0, cell.rep));
        std::shared_ptr<const CorrelationMatrix> corr;
        if (plan.mode == TestMode::statistical) {
            const SemSpec spec = make_sem_spec(dag, seed);
            corr = CorrelationMatrix::of(sample_linear_sem(spec, cell.sample_size, seed));
        }
        auto shared_dag = std::make_shared<const Dag>(dag);
        for (auto& row : rows) {
            row.nodes = dag.size();
            try {
                DiscoveryConfig config;
                config.algorithm = row.algorithm;
                config.mode = plan.mode;
                config.alpha = plan.alpha;
                config.k_thresh = plan.k_thresh;
                config.graph_thresh_size =
                    plan.thresh_size.value_or(DiscoveryConfig::default_thresh_size(dag.size()));
                config.inclusive_refine_bound = plan.inclusive_bound;
                std::unique_ptr<CiTester> tester;
                if (plan.mode == TestMode::oracle) {
                    tester = std::make_unique<OracleTester>(shared_dag);
                } else {
                    tester = std::make_unique<FisherZTester>(corr, plan.alpha);
                }
                RunReport report = run_discovery(iota_varset(dag.size()), *tester, config);
                row.scores = skeleton_scores(report.graph, dag);
                row.edges = report.graph.edge_count();
                row.total_ci_tests = report.total_ci_tests;
                row.refining_ci_tests = report.refining_ci_tests;
                row.refined_edges = report.refined_edges;
                row.examined_edges = report.refine_audit.size();
                row.total_seconds = report.total_seconds;
                row.refining_seconds = report.refining_seconds;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    } catch (const std::exception& e) {
        for (auto& row : rows) {
            row.ok = false;
            row.error = e.what();
        }
    }
    return rows;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchPlan& plan) {
    plan.validate();
    std::vector<std::optional<Dag>> loaded(plan.networks.size());
    for (std::size_t i = 0; i < plan.networks.size(); ++i) {
        if (!plan.networks[i].path.empty()) loaded[i] = read_edge_list_file(plan.networks[i].path);
    }
    const std::vector<std::size_t> sizes =
        plan.mode == TestMode::oracle ? std::vector<std::size_t>{0} : plan.sample_sizes;
    std::vector<Cell> cells;
    for (std::size_t net = 0; net < plan.networks.size(); ++net) {
        for (std::size_t m : sizes) {
            for (std::size_t rep = 0; rep < plan.reps; ++rep) cells.push_back({net, m, rep});
        }
    }

    std::vector<std::vector<BenchRow>> results(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            results[i] = run_cell(plan, cells[i], loaded);
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(plan.jobs, 1, std::max<std::size_t>(cells.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
    }

    std::vector<BenchRow> rows;
    for (auto& cell_rows : results) {
        for (auto& row : cell_rows) rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<BenchRow>& rows) {
    struct Key {
        std::string network;
        std::size_t sample_size;
        Algorithm algorithm;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<const BenchRow*>> groups;
    std::vector<Key> order;
    for (const auto& row : rows) {
        Key key{row.network, row.sample_size, row.algorithm};
        if (!groups.contains(key)) order.push_back(key);
        if (row.ok) groups[key].push_back(&row);
        else groups[key];
    }
    std::vector<AggregateRow> out;
    for (const auto& key : order) {
        const auto& members = groups[key];
        AggregateRow agg;
        agg.algorithm = key.algorithm;
        agg.network = key.network;
        agg.sample_size = key.sample_size;
        agg.reps = members.size();
        agg.ci_available = members.size() >= 2;
        auto stat = [&](auto field) {
            std::vector<double> values;
            for (const auto* r : members) values.push_back(field(*r));
            if (values.size() >= 2) return aggregate(values);
            AggregateStat s;
            s.reps = values.size();
            if (!values.empty()) s.mean = values.front();
            return s;
        };
        agg.f1 = stat([](const BenchRow& r) { return r.scores.f1; });
        agg.precision = stat([](const BenchRow& r) { return r.scores.precision; });
        agg.recall = stat([](const BenchRow& r) { return r.scores.recall; });
        agg.refining_ci_tests = stat([](const BenchRow& r) { return static_cast<double>(r.refining_ci_tests); });
        agg.total_ci_tests = stat([](const BenchRow& r) { return static_cast<double>(r.total_ci_tests); });
        agg.total_seconds = stat([](const BenchRow& r) { return r.total_seconds; });
        out.push_back(agg);
    }
    return out;
}

namespace {

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_runs_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "algorithm,network,nodes,sample_size,rep,seed,precision,recall,f1,tp,fp,fn,edges,"
        "total_ci_tests,refining_ci_tests,refined_edges,examined_edges,total_seconds,"
        "refining_seconds,status,error\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.algorithm)) + "," + csv_field(r.network) + "," +
               std::to_string(r.nodes) + "," + std::to_string(r.sample_size) + "," +
               std::to_string(r.rep) + "," + std::to_string(r.seed) + "," + num(r.scores.precision) +
               "," + num(r.scores.recall) + "," + num(r.scores.f1) + "," +
               std::to_string(r.scores.true_positives) + "," +
               std::to_string(r.scores.false_positives) + "," +
               std::to_string(r.scores.false_negatives) + "," + std::to_string(r.edges) + "," +
               std::to_string(r.total_ci_tests) + "," + std::to_string(r.refining_ci_tests) + "," +
               std::to_string(r.refined_edges) + "," + std::to_string(r.examined_edges) + "," +
               num(r.total_seconds) + "," + num(r.refining_seconds) + "," + (r.ok ? "ok" : "error") +
               "," + csv_field(r.error) + "\n";
    }
    return out;
}

std::string format_aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "algorithm,network,sample_size,reps,ci_available";
    for (const char* metric : {"f1", "precision", "recall", "refining_ci_tests", "total_ci_tests",
                               "total_seconds"}) {
        out += std::string(",") + metric + "_mean," + metric + "_ci";
    }
    out += "\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.algorithm)) + "," + csv_field(r.network) + "," +
               std::to_string(r.sample_size) + "," + std::to_string(r.reps) + "," +
               (r.ci_available ? "true" : "false");
        for (const AggregateStat* s : {&r.f1, &r.precision, &r.recall, &r.refining_ci_tests,
                                       &r.total_ci_tests, &r.total_seconds}) {
            out += "," + num(s->mean) + "," + (r.ci_available ? num(s->half_width) : "NA");
        }
        out += "\n";
    }
    return out;
}

nlohmann::json report_to_json(const RunReport& report, std::uint64_t seed, std::size_t n,
                              std::size_t m, const std::optional<QualityScores>& scores) {
    nlohmann::json j;
    j["algorithm"] = to_string(report.algorithm);
    j["seed"] = seed;
    j["n"] = n;
    j["m"] = m;
    j["edges"] = report.graph.edge_count();
    j["total_ci_tests"] = report.total_ci_tests;
    j["refining_ci_tests"] = report.refining_ci_tests;
    j["refined_edges"] = report.refined_edges;
    j["total_seconds"] = report.total_seconds;
    j["refining_seconds"] = report.refining_seconds;
    j["examined_edges"] = report.refine_audit.size();
    j["partition_calls"] = report.recursion.partition_calls;
    j["pc_calls"] = report.recursion.pc_calls;
    j["pc_fallbacks"] = report.recursion.pc_fallbacks;
    j["max_depth"] = report.recursion.max_depth;
    if (scores) {
        j["precision"] = scores->precision;
        j["recall"] = scores->recall;
        j["f1"] = scores->f1;
    }
    return j;
}

}  // namespace dsepcp
