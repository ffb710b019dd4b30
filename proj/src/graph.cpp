#include "dsepcp/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dsepcp/errors.hpp"

namespace dsepcp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::parse: return "parse";
        case ErrorKind::structure: return "structure";
        case ErrorKind::domain: return "domain";
        case ErrorKind::contract: return "contract";
        case ErrorKind::generation: return "generation";
        case ErrorKind::usage: return "usage";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

VarSet make_varset(std::vector<Var> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

VarSet iota_varset(std::size_t n) {
    VarSet out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

bool contains(const VarSet& set, Var v) {
    return std::binary_search(set.begin(), set.end(), v);
}

VarSet set_union(const VarSet& a, const VarSet& b) {
    VarSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet set_intersection(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet set_difference(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet without(const VarSet& set, std::initializer_list<Var> drop) {
    VarSet out;
    out.reserve(set.size());
    for (Var v : set) {
        if (std::find(drop.begin(), drop.end(), v) == drop.end()) out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dag

namespace {

// Kahn's algorithm; ties broken by lowest index so the order is reproducible.
// Returns fewer than n entries when a cycle exists.
std::vector<Var> kahn_order(std::size_t n, const std::vector<VarSet>& parents,
                            const std::vector<VarSet>& children) {
    std::vector<std::size_t> indegree(n);
    std::vector<Var> ready;
    for (std::size_t v = 0; v < n; ++v) {
        indegree[v] = parents[v].size();
        if (indegree[v] == 0) ready.push_back(static_cast<Var>(v));
    }
    std::vector<Var> order;
    order.reserve(n);
    std::make_heap(ready.begin(), ready.end(), std::greater<>{});
    while (!ready.empty()) {
        std::pop_heap(ready.begin(), ready.end(), std::greater<>{});
        Var v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (Var c : children[v]) {
            if (--indegree[c] == 0) {
                ready.push_back(c);
                std::push_heap(ready.begin(), ready.end(), std::greater<>{});
            }
        }
    }
    return order;
}

}  // namespace

Dag::Dag(std::vector<std::string> names, const std::vector<Edge>& edges)
    : names_(std::move(names)), parents_(names_.size()), children_(names_.size()) {
    const auto n = static_cast<Var>(names_.size());
    for (Var v = 0; v < n; ++v) {
        if (!index_.emplace(names_[v], v).second) {
            throw Error(ErrorKind::structure, "duplicate variable name '" + names_[v] + "'");
        }
    }
    for (auto [from, to] : edges) {
        if (from < 0 || from >= n || to < 0 || to >= n) {
            throw Error(ErrorKind::domain, "edge endpoint out of range");
        }
        if (from == to) {
            throw Error(ErrorKind::structure, "self-loop on '" + names_[from] + "'");
        }
        parents_[to].push_back(from);
        children_[from].push_back(to);
    }
    for (Var v = 0; v < n; ++v) {
        const auto before = parents_[v].size();
        parents_[v] = make_varset(std::move(parents_[v]));
        children_[v] = make_varset(std::move(children_[v]));
        if (parents_[v].size() != before) {
            throw Error(ErrorKind::structure, "duplicate edge into '" + names_[v] + "'");
        }
        edge_count_ += parents_[v].size();
    }
    order_ = kahn_order(names_.size(), parents_, children_);
    if (order_.size() != names_.size()) {
        // Any edge between two unordered vertices lies on or leads into a cycle;
        // walk parents from an unordered vertex until one repeats.
        std::vector<std::uint8_t> placed(names_.size(), 0);
        for (Var v : order_) placed[v] = 1;
        Var start = 0;
        while (placed[start]) ++start;
        std::vector<int> seen(names_.size(), -1);
        Var cur = start;
        int step = 0;
        while (seen[cur] < 0) {
            seen[cur] = step++;
            for (Var p : parents_[cur]) {
                if (!placed[p]) {
                    cur = p;
                    break;
                }
            }
        }
        Var next = cur;
        for (Var p : parents_[cur]) {
            if (!placed[p]) {
                next = p;
                break;
            }
        }
        throw Error(ErrorKind::structure,
                    "cycle detected through edge " + names_[next] + " -> " + names_[cur]);
    }
}

void Dag::check(Var v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= names_.size()) {
        throw Error(ErrorKind::domain, "unknown variable index " + std::to_string(v));
    }
}

const std::string& Dag::name(Var v) const {
    check(v);
    return names_[v];
}

Var Dag::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw Error(ErrorKind::domain, "unknown variable '" + std::string(name) + "'");
    }
    return it->second;
}

const VarSet& Dag::parents(Var v) const {
    check(v);
    return parents_[v];
}

const VarSet& Dag::children(Var v) const {
    check(v);
    return children_[v];
}

bool Dag::has_edge(Var from, Var to) const {
    check(from);
    check(to);
    return contains(parents_[to], from);
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Var v = 0; v < static_cast<Var>(size()); ++v) {
        for (Var c : children_[v]) out.emplace_back(v, c);
    }
    return out;
}

bool Dag::operator==(const Dag& other) const {
    return names_ == other.names_ && parents_ == other.parents_;
}

Dag parse_edge_list(std::string_view text) {
    std::vector<std::string> names;
    std::unordered_map<std::string, Var> index;
    std::vector<Edge> edges;
    auto intern = [&](const std::string& token) {
        auto [it, inserted] = index.emplace(token, static_cast<Var>(names.size()));
        if (inserted) names.push_back(token);
        return it->second;
    };

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) tokens.push_back(tok);
        if (tokens.empty() || tokens.front().front() == '#') continue;
        if (tokens.size() == 1) {
            intern(tokens[0]);
        } else if (tokens.size() == 2) {
            Var from = intern(tokens[0]);
            Var to = intern(tokens[1]);
            edges.emplace_back(from, to);
        } else {
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                              ": expected 'parent child', got '" + line + "'");
        }
    }
    return Dag(std::move(names), edges);
}

Dag read_edge_list_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str());
}

std::string format_edge_list(const Dag& dag) {
    // Edges go out sorted by (parent, child). When their first appearances
    // would not reproduce the variable order, every variable is declared up
    // front so that parsing the text gives back the same indices.
    std::vector<Var> appearance;
    std::vector<std::uint8_t> seen(dag.size(), 0);
    auto note = [&](Var v) {
        if (!seen[v]) appearance.push_back(v);
        seen[v] = 1;
    };
    for (auto [from, to] : dag.edges()) {
        note(from);
        note(to);
    }
    bool in_order = true;
    for (std::size_t i = 0; i < appearance.size(); ++i) in_order = in_order && appearance[i] == static_cast<Var>(i);

    std::string out;
    for (Var v = 0; v < static_cast<Var>(dag.size()); ++v) {
        if (!in_order || !seen[v]) out += dag.name(v) + "\n";
    }
    for (auto [from, to] : dag.edges()) out += dag.name(from) + " " + dag.name(to) + "\n";
    return out;
}

std::vector<Var> topological_order(const Dag& dag) { return dag.topological_order(); }

namespace {

template <typename Next>
VarSet reach(std::size_t n, Var start, Next&& next) {
    std::vector<std::uint8_t> seen(n, 0);
    std::deque<Var> queue{start};
    VarSet out;
    while (!queue.empty()) {
        Var v = queue.front();
        queue.pop_front();
        for (Var w : next(v)) {
            if (!seen[w] && w != start) {
                seen[w] = 1;
                out.push_back(w);
                queue.push_back(w);
            }
        }
    }
    return make_varset(std::move(out));
}

}  // namespace

VarSet descendants(const Dag& dag, Var v) {
    dag.name(v);
    return reach(dag.size(), v, [&](Var u) -> const VarSet& { return dag.children(u); });
}

VarSet ancestors(const Dag& dag, Var v) {
    dag.name(v);
    return reach(dag.size(), v, [&](Var u) -> const VarSet& { return dag.parents(u); });
}

// ---------------------------------------------------------------------------
// CausalGraph

CausalGraph::CausalGraph(std::size_t universe, VarSet variables, GraphMode mode)
    : universe_(universe),
      variables_(make_varset(std::move(variables))),
      member_(universe, 0),
      dir_(universe * universe, 0),
      mode_(mode) {
    for (Var v : variables_) {
        if (v < 0 || static_cast<std::size_t>(v) >= universe) {
            throw Error(ErrorKind::domain, "variable outside universe");
        }
        member_[v] = 1;
    }
}

CausalGraph CausalGraph::complete(std::size_t universe, VarSet variables) {
    CausalGraph g(universe, std::move(variables), GraphMode::undirected);
    for (Var i : g.variables_) {
        for (Var j : g.variables_) {
            if (i != j) g.dir_[g.index(i, j)] = 1;
        }
    }
    return g;
}

CausalGraph CausalGraph::skeleton_of(const Dag& dag) {
    CausalGraph g(dag.size(), iota_varset(dag.size()), GraphMode::undirected);
    for (auto [from, to] : dag.edges()) g.add_edge(from, to);
    return g;
}

CausalGraph CausalGraph::directed_of(const Dag& dag) {
    CausalGraph g(dag.size(), iota_varset(dag.size()), GraphMode::directed);
    for (auto [from, to] : dag.edges()) g.add_edge(from, to);
    return g;
}

std::size_t CausalGraph::index(Var i, Var j) const {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= universe_ ||
        static_cast<std::size_t>(j) >= universe_) {
        throw Error(ErrorKind::domain, "variable outside universe");
    }
    return static_cast<std::size_t>(i) * universe_ + static_cast<std::size_t>(j);
}

bool CausalGraph::contains(Var v) const {
    return v >= 0 && static_cast<std::size_t>(v) < universe_ && member_[v] != 0;
}

void CausalGraph::add_edge(Var i, Var j) {
    if (i == j) throw Error(ErrorKind::structure, "self-loop");
    if (!contains(i) || !contains(j)) {
        throw Error(ErrorKind::domain, "edge endpoint not in graph");
    }
    dir_[index(i, j)] = 1;
    if (mode_ == GraphMode::undirected) dir_[index(j, i)] = 1;
}

void CausalGraph::remove_edge(Var i, Var j) {
    dir_[index(i, j)] = 0;
    dir_[index(j, i)] = 0;
}

void CausalGraph::set_dir(Var i, Var j, bool value) {
    if (value && (i == j || !contains(i) || !contains(j))) {
        throw Error(ErrorKind::domain, "invalid edge endpoints");
    }
    dir_[index(i, j)] = value ? 1 : 0;
}

VarSet CausalGraph::neighbors(Var v) const {
    VarSet out;
    for (Var u : variables_) {
        if (u != v && adjacent(v, u)) out.push_back(u);
    }
    return out;
}

VarSet CausalGraph::parents(Var v) const {
    if (mode_ == GraphMode::undirected) return neighbors(v);
    VarSet out;
    for (Var u : variables_) {
        if (dir(u, v)) out.push_back(u);
    }
    return out;
}

VarSet CausalGraph::children(Var v) const {
    if (mode_ == GraphMode::undirected) return neighbors(v);
    VarSet out;
    for (Var u : variables_) {
        if (dir(v, u)) out.push_back(u);
    }
    return out;
}

std::vector<Edge> CausalGraph::skeleton_edges() const {
    std::vector<Edge> out;
    for (std::size_t a = 0; a < variables_.size(); ++a) {
        for (std::size_t b = a + 1; b < variables_.size(); ++b) {
            if (adjacent(variables_[a], variables_[b])) out.emplace_back(variables_[a], variables_[b]);
        }
    }
    return out;
}

std::vector<Edge> CausalGraph::edges() const {
    if (mode_ == GraphMode::undirected) return skeleton_edges();
    std::vector<Edge> out;
    for (Var i : variables_) {
        for (Var j : variables_) {
            if (dir(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

namespace {

void require_directed(const CausalGraph& graph, const char* what) {
    if (graph.mode() != GraphMode::directed) {
        throw Error(ErrorKind::contract, std::string(what) + " requires a directed graph");
    }
}

}  // namespace

std::vector<Var> topological_order(const CausalGraph& graph) {
    require_directed(graph, "topological_order");
    const std::size_t n = graph.universe();
    std::vector<VarSet> parents(n), children(n);
    for (auto [from, to] : graph.edges()) {
        parents[to].push_back(from);
        children[from].push_back(to);
    }
    auto order = kahn_order(n, parents, children);
    // Variables outside the graph have no edges and sort trivially; drop them.
    std::erase_if(order, [&](Var v) { return !graph.contains(v); });
    if (order.size() != graph.variables().size()) {
        throw Error(ErrorKind::structure, "directed graph contains a cycle");
    }
    return order;
}

VarSet descendants(const CausalGraph& graph, Var v) {
    require_directed(graph, "descendants");
    return reach(graph.universe(), v, [&](Var u) { return graph.children(u); });
}

VarSet ancestors(const CausalGraph& graph, Var v) {
    require_directed(graph, "ancestors");
    return reach(graph.universe(), v, [&](Var u) { return graph.parents(u); });
}

VarSet colliders_directed(const CausalGraph& graph) {
    require_directed(graph, "colliders_directed");
    VarSet out;
    for (Var v : graph.variables()) {
        if (graph.parents(v).size() >= 2) out.push_back(v);
    }
    return out;
}

std::string format_skeleton(const CausalGraph& graph, const std::vector<std::string>& names) {
    auto label = [&](Var v) {
        return static_cast<std::size_t>(v) < names.size() ? names[v] : std::to_string(v);
    };
    std::string out;
    for (Var v : graph.variables()) {
        if (graph.neighbors(v).empty()) out += label(v) + "\n";
    }
    for (auto [a, b] : graph.skeleton_edges()) out += label(a) + " " + label(b) + "\n";
    return out;
}

}  // namespace dsepcp
