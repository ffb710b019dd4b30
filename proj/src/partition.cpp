#include "dsepcp/partition.hpp"

#include <algorithm>

#include "dsepcp/errors.hpp"

namespace dsepcp {

IndependenceMatrix::IndependenceMatrix(VarSet variables, std::size_t k_order)
    : variables_(make_varset(std::move(variables))),
      k_order_(k_order),
      bits_(variables_.size() * variables_.size(), 0) {}

std::size_t IndependenceMatrix::position(Var v) const {
    auto it = std::lower_bound(variables_.begin(), variables_.end(), v);
    if (it == variables_.end() || *it != v) {
        throw Error(ErrorKind::domain, "variable not in independence matrix");
    }
    return static_cast<std::size_t>(it - variables_.begin());
}

bool IndependenceMatrix::separated(Var a, Var b) const { return at(position(a), position(b)); }

void IndependenceMatrix::mark(std::size_t i, std::size_t j, VarSet witness) {
    const std::size_t n = variables_.size();
    bits_[i * n + j] = 1;
    bits_[j * n + i] = 1;
    sepsets_.insert(variables_[i], variables_[j], std::move(witness));
}

std::vector<Edge> IndependenceMatrix::separated_pairs() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        for (std::size_t j = i + 1; j < variables_.size(); ++j) {
            if (at(i, j)) out.emplace_back(variables_[i], variables_[j]);
        }
    }
    return out;
}

bool IndependenceMatrix::same_entries(const IndependenceMatrix& other) const {
    return variables_ == other.variables_ && bits_ == other.bits_;
}

IndependenceMatrix independence_matrix(const VarSet& variables, CiTester& tester,
                                       std::size_t k_order, const IndependenceMatrix* previous) {
    IndependenceMatrix matrix(variables, k_order);
    const VarSet& vars = matrix.variables();
    std::size_t min_size = 0;
    if (previous) {
        if (previous->variables() != vars || previous->k_order() > k_order) {
            throw Error(ErrorKind::contract, "previous matrix does not match this request");
        }
        min_size = previous->k_order() + 1;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            if (previous && previous->at(i, j)) {
                matrix.mark(i, j, *previous->sepsets().find(vars[i], vars[j]));
                continue;
            }
            const VarSet rest = without(vars, {vars[i], vars[j]});
            if (auto z = find_separating_set(tester, vars[i], vars[j], rest, min_size, k_order)) {
                matrix.mark(i, j, std::move(*z));
            }
        }
    }
    return matrix;
}

namespace {

struct Assignment {
    VarSet a, b, c;
};

Assignment assign(const IndependenceMatrix& m, bool zero_rows) {
    const std::size_t n = m.variables().size();
    std::vector<std::uint8_t> priority(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) priority[i * n + j] = m.at(i, j) ? 1 : 0;
    }
    std::vector<std::uint8_t> assigned(n, 0);
    std::vector<std::size_t> a, b, c;

    auto separated_from_all = [&](std::size_t w, const std::vector<std::size_t>& group) {
        return std::all_of(group.begin(), group.end(),
                           [&](std::size_t g) { return m.at(w, g); });
    };

    for (std::size_t iteration = 0; iteration < n; ++iteration) {
        std::size_t w = n;
        std::size_t best = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (assigned[r]) continue;
            std::size_t score = 0;
            for (std::size_t row = 0; row < n; ++row) score += priority[row * n + r];
            if (w == n || score > best) {
                w = r;
                best = score;
            }
        }
        if (!b.empty() && separated_from_all(w, b)) {
            a.push_back(w);
        } else if (separated_from_all(w, a)) {
            b.push_back(w);
        } else {
            c.push_back(w);
        }
        assigned[w] = 1;
        for (std::size_t row = 0; row < n; ++row) priority[row * n + w] = 0;
        if (zero_rows) {
            for (std::size_t col = 0; col < n; ++col) priority[w * n + col] = 0;
        }
    }

    auto to_vars = [&](const std::vector<std::size_t>& pos) {
        VarSet out;
        for (std::size_t p : pos) out.push_back(m.variables()[p]);
        return make_varset(std::move(out));
    };
    return {to_vars(a), to_vars(b), to_vars(c)};
}

bool efficient(const Assignment& s) {
    return !s.a.empty() && !s.b.empty() && s.c.size() < s.a.size() + s.b.size();
}

}  // namespace

PartitionResult find_causal_partitions(const VarSet& variables, CiTester& tester,
                                       const PartitionOptions& options) {
    if (variables.size() < 2) {
        throw Error(ErrorKind::contract, "partitioning needs at least two variables");
    }
    PartitionResult result;
    std::size_t k_order = 0;
    IndependenceMatrix matrix = independence_matrix(variables, tester, k_order);
    Assignment split;
    while (true) {
        ++result.rounds;
        split = assign(matrix, options.zero_rows);
        if (efficient(split) || k_order + 1 >= options.k_thresh) break;
        ++k_order;
        matrix = independence_matrix(variables, tester, k_order, &matrix);
    }
    result.efficient = efficient(split);
    result.k_order_used = k_order;
    result.v1 = set_union(split.a, split.c);
    result.v2 = set_union(split.b, split.c);
    result.a = std::move(split.a);
    result.b = std::move(split.b);
    result.c = std::move(split.c);
    result.matrix = std::move(matrix);
    return result;
}

}  // namespace dsepcp
