#include "tslp/compressor.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tslp/dag.hpp"
#include "tslp/random.hpp"

namespace tslp {

namespace {

// preorder ranks and a-leaf subtree sizes for every node of the piece
struct PieceMetrics {
    std::vector<std::uint64_t> size;
    std::vector<std::uint64_t> preorder;
    std::vector<bool> reachable;  // punch_hole can leave stale arena slots

    explicit PieceMetrics(const Term& t)
        : size(t.node_count(), 0), preorder(t.node_count(), 0),
          reachable(t.node_count(), false) {
        for (std::size_t i = 0; i < t.node_count(); ++i) {
            const Term::Node& n = t.node(static_cast<std::int32_t>(i));
            if (n.kind == Term::NodeKind::Internal)
                size[i] = size[static_cast<std::size_t>(n.left)] +
                          size[static_cast<std::size_t>(n.right)];
            else
                size[i] = n.kind == Term::NodeKind::Leaf ? 1 : 0;
        }
        std::uint64_t rank = 0;
        std::vector<std::int32_t> stack{t.root()};
        while (!stack.empty()) {
            std::int32_t v = stack.back();
            stack.pop_back();
            preorder[static_cast<std::size_t>(v)] = rank++;
            reachable[static_cast<std::size_t>(v)] = true;
            const Term::Node& n = t.node(v);
            if (n.kind == Term::NodeKind::Internal) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            }
        }
    }
};

// separator for a tree piece of size s >= 2: a-leaf size within
// [s/3, 2s/3], minimizing |s - 2 size|, then smallest preorder rank
std::int32_t choose_tree_separator(const Term& t) {
    PieceMetrics m(t);
    const std::uint64_t s = t.size();
    std::int32_t best = -1;
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        if (!m.reachable[i]) continue;
        const std::uint64_t sz = m.size[i];
        if (3 * sz < s || 3 * sz > 2 * s) continue;
        if (best < 0) {
            best = static_cast<std::int32_t>(i);
            continue;
        }
        const auto diff = [&](std::size_t j) {
            const std::uint64_t two = 2 * m.size[j];
            return two > s ? two - s : s - two;
        };
        const std::size_t b = static_cast<std::size_t>(best);
        if (diff(i) < diff(b) || (diff(i) == diff(b) && m.preorder[i] < m.preorder[b]))
            best = static_cast<std::int32_t>(i);
    }
    return best;
}

// separator for a context piece whose hole sits at depth >= 2: an
// internal node strictly between the root and the hole, same tie rule
// (on a path, smaller preorder = closer to the root)
std::int32_t choose_spine_separator(const Term& c) {
    PieceMetrics m(c);
    const std::uint64_t s = c.size();
    // walk the hole path
    std::int32_t v = c.root();
    std::int32_t best = -1;
    std::uint64_t best_diff = 0;
    while (true) {
        const Term::Node& n = c.node(v);
        if (n.kind != Term::NodeKind::Internal) break;
        std::int32_t next = c.subtree_has_hole(n.left) ? n.left : n.right;
        if (c.node(next).kind != Term::NodeKind::Internal) break;
        const std::uint64_t two = 2 * m.size[static_cast<std::size_t>(next)];
        const std::uint64_t diff = two > s ? two - s : s - two;
        if (best < 0 || diff < best_diff) {
            best = next;
            best_diff = diff;
        }
        v = next;
    }
    return best;
}

NormalFormTslp compress_bisection(const Term& t) {
    if (t.size() == 1) return NormalFormTslp::leaf_grammar();

    std::unordered_map<std::string, Symbol> memo;
    std::vector<NormalRule> rules;
    std::vector<std::pair<Symbol, Term>> worklist;

    auto sym_of = [&](const Term& piece) {
        std::string key = serialize_term(piece);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Symbol id = static_cast<Symbol>(rules.size());
        rules.push_back({RuleType::Apply, kSymbolA, kSymbolA});  // placeholder
        memo.emplace(std::move(key), id);
        worklist.push_back({id, piece});
        return id;
    };
    auto tree_arg = [&](const Term& sub) {
        return sub.size() == 1 ? kSymbolA : sym_of(sub);
    };

    sym_of(t);  // start symbol, id 0
    while (!worklist.empty()) {
        auto [sym, piece] = std::move(worklist.back());
        worklist.pop_back();
        if (piece.is_tree()) {
            std::int32_t v = choose_tree_separator(piece);
            Term sub = piece.subterm(v);
            Term ctx = piece.punch_hole(v);
            NormalRule r{RuleType::Apply, sym_of(ctx), tree_arg(sub)};
            rules[static_cast<std::size_t>(sym)] = r;
            continue;
        }
        const Term::Node& root = piece.node(piece.root());
        const bool hole_left = piece.subtree_has_hole(root.left);
        std::int32_t hole_child = hole_left ? root.left : root.right;
        if (piece.node(hole_child).kind == Term::NodeKind::Hole) {
            // single split level: f(alpha, x) or f(x, alpha)
            Term other = piece.subterm(hole_left ? root.right : root.left);
            NormalRule r{hole_left ? RuleType::PairRight : RuleType::PairLeft,
                         tree_arg(other), kSymbolA};
            rules[static_cast<std::size_t>(sym)] = r;
            continue;
        }
        std::int32_t v = choose_spine_separator(piece);
        Term bottom = piece.subterm(v);
        Term top = piece.punch_hole(v);
        NormalRule r{RuleType::Compose, sym_of(top), sym_of(bottom)};
        rules[static_cast<std::size_t>(sym)] = r;
    }
    return canonical_renumber(NormalFormTslp(std::move(rules)));
}

}  // namespace

NormalFormTslp compress(const Term& t, CompressorId which) {
    if (!t.is_tree()) throw std::invalid_argument("compress: input must be a tree");
    switch (which) {
        case CompressorId::Bisection: return compress_bisection(t);
        case CompressorId::DagRoute: return dag_to_normal_tslp(build_minimal_dag(t));
    }
    throw std::logic_error("unknown compressor");
}

double gamma_exhaustive(CompressorId which, std::uint32_t n, std::uint64_t budget) {
    if (n == 0) throw std::invalid_argument("gamma: n must be >= 1");
    BigInt total = catalan(n - 1);
    if (total > budget)
        throw std::length_error("gamma_exhaustive: enumeration exceeds the tree budget");
    double best = 0.0;
    for (BigInt i = 0; i < total; ++i) {
        Term t = nth_tree(n, i);
        best = std::max(best, static_cast<double>(compress(t, which).size()) /
                                  static_cast<double>(n));
    }
    return best;
}

double gamma_sampled(CompressorId which, std::uint32_t n, std::uint64_t count,
                     std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("gamma: n must be >= 1");
    std::mt19937_64 rng(seed);
    BigInt total = catalan(n - 1);
    double best = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
        Term t = nth_tree(n, uniform_bigint_below(rng, total));
        best = std::max(best, static_cast<double>(compress(t, which).size()) /
                                  static_cast<double>(n));
    }
    return best;
}

}  // namespace tslp
