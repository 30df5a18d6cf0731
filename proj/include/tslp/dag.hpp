#pragma once

#include <cstdint>
#include <vector>

#include "tslp/grammar.hpp"
#include "tslp/term.hpp"

namespace tslp {

/// Minimal DAG of a binary tree: one rule A_i -> f(left,right) per
/// distinct subtree with >= 2 leaves, indices in topological order (every
/// reference points to a larger index, the root is A_0). The tree `a` is
/// the distinguished rule-free singleton.
struct Dag {
    struct Rule {
        Symbol left;   // kSymbolA or nonterminal index
        Symbol right;
        bool operator==(const Rule&) const = default;
    };
    std::vector<Rule> rules;

    bool is_singleton() const { return rules.empty(); }
    bool operator==(const Dag&) const = default;
};

/// One nonterminal per distinct subtree of size >= 2; deterministic
/// canonical indices (structurally equal trees build identical DAGs).
Dag build_minimal_dag(const Term& t);

/// Number of distinct subtrees of the unfolded tree: n+1 for n rules,
/// 1 for the singleton.
std::uint64_t dag_size(const Dag& d);

Term unfold(const Dag& d);

/// Rank-1 shells are emitted right-leaning (f(x, beta)) and hash-consed
/// per distinct right child, so |result| <= 4 * dag_size(d).
NormalFormTslp dag_to_normal_tslp(const Dag& d);

}  // namespace tslp
