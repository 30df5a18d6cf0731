#include "tslp/dag.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace tslp {

Dag build_minimal_dag(const Term& t) {
    if (!t.is_tree()) throw std::invalid_argument("build_minimal_dag: input must be a tree");
    Dag d;
    if (t.size() == 1) return d;

    // hash-cons every internal node bottom-up; children at lower arena
    // indices than parents, so a forward scan suffices
    const auto node_total = t.node_count();
    std::vector<Symbol> class_of(node_total, kSymbolA);
    std::map<std::pair<Symbol, Symbol>, Symbol> interned;
    std::vector<Dag::Rule> by_class;  // indexed by interned class id
    for (std::size_t i = 0; i < node_total; ++i) {
        const Term::Node& n = t.node(static_cast<std::int32_t>(i));
        if (n.kind != Term::NodeKind::Internal) continue;
        Symbol l = class_of[static_cast<std::size_t>(n.left)];
        Symbol r = class_of[static_cast<std::size_t>(n.right)];
        auto [it, fresh] = interned.try_emplace({l, r}, static_cast<Symbol>(by_class.size()));
        if (fresh) by_class.push_back({l, r});
        class_of[i] = it->second;
    }

    // reindex in DFS reverse-postorder from the root so that every
    // reference points to a larger index
    Symbol root_class = class_of[static_cast<std::size_t>(t.root())];
    std::vector<Symbol> new_of(by_class.size(), -1);
    std::vector<Symbol> postorder;
    std::vector<std::pair<Symbol, bool>> stack{{root_class, false}};
    std::vector<bool> visited(by_class.size(), false);
    while (!stack.empty()) {
        auto [c, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            postorder.push_back(c);
            continue;
        }
        if (visited[static_cast<std::size_t>(c)]) continue;
        visited[static_cast<std::size_t>(c)] = true;
        stack.push_back({c, true});
        const Dag::Rule& r = by_class[static_cast<std::size_t>(c)];
        if (r.right != kSymbolA) stack.push_back({r.right, false});
        if (r.left != kSymbolA) stack.push_back({r.left, false});
    }
    for (std::size_t i = 0; i < postorder.size(); ++i)
        new_of[static_cast<std::size_t>(postorder[postorder.size() - 1 - i])] =
            static_cast<Symbol>(i);
    d.rules.resize(by_class.size());
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        Dag::Rule r = by_class[c];
        if (r.left != kSymbolA) r.left = new_of[static_cast<std::size_t>(r.left)];
        if (r.right != kSymbolA) r.right = new_of[static_cast<std::size_t>(r.right)];
        d.rules[static_cast<std::size_t>(new_of[c])] = r;
    }
    return d;
}

std::uint64_t dag_size(const Dag& d) {
    return d.is_singleton() ? 1 : d.rules.size() + 1;
}

Term unfold(const Dag& d) {
    if (d.is_singleton()) return Term::leaf();
    std::vector<Term> val(d.rules.size());
    auto of = [&](Symbol s) { return s == kSymbolA ? Term::leaf() : val[static_cast<std::size_t>(s)]; };
    for (std::size_t i = d.rules.size(); i-- > 0;)
        val[i] = Term::internal(of(d.rules[i].left), of(d.rules[i].right));
    return val[0];
}

NormalFormTslp dag_to_normal_tslp(const Dag& d) {
    if (d.is_singleton()) return NormalFormTslp::leaf_grammar();
    const std::size_t n = d.rules.size();
    std::vector<NormalRule> rules;
    // tree nonterminal for DAG rule i sits at index i; shell contexts
    // f(x, beta) are appended afterwards, one per distinct right child
    rules.resize(n);
    std::map<Symbol, Symbol> shell_of;
    for (std::size_t i = n; i-- > 0;) {
        Symbol beta = d.rules[i].right;
        auto [it, fresh] = shell_of.try_emplace(beta, static_cast<Symbol>(n + shell_of.size()));
        if (fresh) {
            // placeholder; emitted below once indices are final
        }
        rules[i] = {RuleType::Apply, it->second, d.rules[i].left};
    }
    for (const auto& [beta, sym] : shell_of) {
        rules.resize(std::max(rules.size(), static_cast<std::size_t>(sym) + 1));
        rules[static_cast<std::size_t>(sym)] = {RuleType::PairRight, beta, kSymbolA};
    }
    return canonical_renumber(NormalFormTslp(std::move(rules)));
}

}  // namespace tslp
