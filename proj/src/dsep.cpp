#include "dsepcp/dsep.hpp"

#include <vector>

#include "dsepcp/errors.hpp"

namespace dsepcp {

namespace {

void check_query(const Dag& dag, Var x, Var y, const VarSet& z) {
    dag.name(x);
    dag.name(y);
    for (Var v : z) dag.name(v);
    if (x == y) throw Error(ErrorKind::contract, "d-separation query needs x != y");
    if (contains(z, x) || contains(z, y)) {
        throw Error(ErrorKind::contract, "conditioning set contains a query variable");
    }
}

}  // namespace

bool d_separated(const Dag& dag, Var x, Var y, const VarSet& z) {
    check_query(dag, x, y, z);
    const std::size_t n = dag.size();

    std::vector<std::uint8_t> observed(n, 0);
    for (Var v : z) observed[v] = 1;

    // Nodes that are in z or have a descendant in z: a collider here is open.
    std::vector<std::uint8_t> opens_collider(n, 0);
    std::vector<Var> stack(z.begin(), z.end());
    while (!stack.empty()) {
        Var v = stack.back();
        stack.pop_back();
        if (opens_collider[v]) continue;
        opens_collider[v] = 1;
        for (Var p : dag.parents(v)) stack.push_back(p);
    }

    // Traverse (node, arrived-from-child) states. Arriving "up" means the
    // trail entered the node through one of its children.
    enum : std::uint8_t { up = 1, down = 2 };
    std::vector<std::uint8_t> visited(n, 0);
    std::vector<std::pair<Var, std::uint8_t>> frontier{{x, up}};
    while (!frontier.empty()) {
        auto [v, direction] = frontier.back();
        frontier.pop_back();
        if (visited[v] & direction) continue;
        visited[v] |= direction;
        if (v == y) return false;

        if (direction == up) {
            if (observed[v]) continue;
            for (Var p : dag.parents(v)) frontier.emplace_back(p, up);
            for (Var c : dag.children(v)) frontier.emplace_back(c, down);
        } else {
            if (!observed[v]) {
                for (Var c : dag.children(v)) frontier.emplace_back(c, down);
            }
            if (opens_collider[v]) {
                for (Var p : dag.parents(v)) frontier.emplace_back(p, up);
            }
        }
    }
    return true;
}

namespace {

struct PathSearch {
    const Dag& dag;
    Var target;
    std::vector<std::uint8_t> in_z;
    std::vector<std::uint8_t> on_path;
    std::vector<Var> path;
    std::size_t visited = 0;
    std::size_t limit;

    bool collider_open(Var w) const {
        if (in_z[w]) return true;
        for (Var d : descendants(dag, w)) {
            if (in_z[d]) return true;
        }
        return false;
    }

    // A path is blocked if some interior node blocks it: a non-collider in z,
    // or a collider that neither it nor any of its descendants is in z.
    bool path_blocked() const {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            Var prev = path[i - 1], w = path[i], next = path[i + 1];
            bool collider = dag.has_edge(prev, w) && dag.has_edge(next, w);
            if (collider ? !collider_open(w) : in_z[w] != 0) return true;
        }
        return false;
    }

    // Returns true when an unblocked path was found.
    bool extend(Var v) {
        if (++visited > limit) {
            throw Error(ErrorKind::contract, "path enumeration limit exceeded");
        }
        if (v == target) return !path_blocked();
        auto step = [&](Var w) {
            if (on_path[w]) return false;
            on_path[w] = 1;
            path.push_back(w);
            bool open = extend(w);
            path.pop_back();
            on_path[w] = 0;
            return open;
        };
        for (Var p : dag.parents(v)) {
            if (step(p)) return true;
        }
        for (Var c : dag.children(v)) {
            if (step(c)) return true;
        }
        return false;
    }
};

}  // namespace

bool d_separated_bruteforce(const Dag& dag, Var x, Var y, const VarSet& z,
                            std::size_t path_limit) {
    check_query(dag, x, y, z);
    PathSearch search{dag, y, std::vector<std::uint8_t>(dag.size(), 0),
                      std::vector<std::uint8_t>(dag.size(), 0), {x}, 0, path_limit};
    for (Var v : z) search.in_z[v] = 1;
    search.on_path[x] = 1;
    return !search.extend(x);
}

}  // namespace dsepcp
