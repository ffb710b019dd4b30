#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dsepcp {

/// Variable identity inside a run. Names only exist at the I/O layer.
using Var = int;

/// Sorted, duplicate-free list of variables.
using VarSet = std::vector<Var>;

using Edge = std::pair<Var, Var>;

// Set helpers over sorted VarSets.
VarSet make_varset(std::vector<Var> vars);
VarSet iota_varset(std::size_t n);
bool contains(const VarSet& set, Var v);
VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_intersection(const VarSet& a, const VarSet& b);
VarSet set_difference(const VarSet& a, const VarSet& b);
VarSet without(const VarSet& set, std::initializer_list<Var> drop);

/// Ground-truth directed acyclic graph over named variables.
class Dag {
public:
    Dag() = default;

    /// Validates indices, self-loops, duplicates and acyclicity.
    Dag(std::vector<std::string> names, const std::vector<Edge>& edges);

    std::size_t size() const noexcept { return names_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(Var v) const;
    Var index_of(std::string_view name) const;

    const VarSet& parents(Var v) const;
    const VarSet& children(Var v) const;
    bool has_edge(Var from, Var to) const;

    /// Edges sorted by (parent, child).
    std::vector<Edge> edges() const;

    /// A topological order, computed once at construction.
    const std::vector<Var>& topological_order() const noexcept { return order_; }

    bool operator==(const Dag& other) const;

private:
    void check(Var v) const;

    std::vector<std::string> names_;
    std::unordered_map<std::string, Var> index_;
    std::vector<VarSet> parents_;
    std::vector<VarSet> children_;
    std::vector<Var> order_;
    std::size_t edge_count_ = 0;
};

/// Parses the line-oriented "parent child" format. Lines starting with '#'
/// are comments; a line holding a single token declares an isolated node.
Dag parse_edge_list(std::string_view text);
Dag read_edge_list_file(const std::string& path);
std::string format_edge_list(const Dag& dag);

std::vector<Var> topological_order(const Dag& dag);
VarSet descendants(const Dag& dag, Var v);
VarSet ancestors(const Dag& dag, Var v);

enum class GraphMode { directed, undirected };

/// Discovered structure over a subset of a fixed variable universe.
///
/// The adjacency matrix `dir` is dense over the whole universe so sub-problem
/// results can be merged entry by entry. In undirected mode the matrix is
/// kept symmetric; in directed mode `dir(i, j)` means i -> j.
class CausalGraph {
public:
    CausalGraph() = default;
    CausalGraph(std::size_t universe, VarSet variables, GraphMode mode);

    static CausalGraph complete(std::size_t universe, VarSet variables);
    static CausalGraph skeleton_of(const Dag& dag);
    static CausalGraph directed_of(const Dag& dag);

    std::size_t universe() const noexcept { return universe_; }
    const VarSet& variables() const noexcept { return variables_; }
    bool contains(Var v) const;
    GraphMode mode() const noexcept { return mode_; }

    bool dir(Var i, Var j) const { return dir_[index(i, j)] != 0; }
    bool adjacent(Var i, Var j) const { return dir(i, j) || dir(j, i); }

    /// Undirected mode sets both entries; directed mode sets i -> j only.
    void add_edge(Var i, Var j);
    /// Removes the edge in both directions.
    void remove_edge(Var i, Var j);
    void set_dir(Var i, Var j, bool value);

    VarSet neighbors(Var v) const;
    /// Directed mode: incoming arcs. Undirected mode: same as neighbors.
    VarSet parents(Var v) const;
    VarSet children(Var v) const;

    /// Unordered adjacent pairs (i < j), regardless of mode.
    std::vector<Edge> skeleton_edges() const;
    /// Directed arcs in directed mode, skeleton edges otherwise.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const { return edges().size(); }

    bool operator==(const CausalGraph& other) const = default;

private:
    std::size_t index(Var i, Var j) const;

    std::size_t universe_ = 0;
    VarSet variables_;
    std::vector<std::uint8_t> member_;
    std::vector<std::uint8_t> dir_;
    GraphMode mode_ = GraphMode::undirected;
};

std::vector<Var> topological_order(const CausalGraph& graph);
VarSet descendants(const CausalGraph& graph, Var v);
VarSet ancestors(const CausalGraph& graph, Var v);

/// Variables with at least two incoming arcs.
VarSet colliders_directed(const CausalGraph& graph);

/// Skeleton edges rendered with variable names, one "a b" per line, plus a
/// declaration line for every variable without edges.
std::string format_skeleton(const CausalGraph& graph, const std::vector<std::string>& names);

}  // namespace dsepcp
