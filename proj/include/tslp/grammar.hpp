#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tslp/term.hpp"

namespace tslp {

/// Symbol in rule payloads and the rho word: kSymbolA for the constant
/// a, otherwise a nonterminal index >= 0.
using Symbol = std::int32_t;
constexpr Symbol kSymbolA = -1;

enum class RuleType : std::uint8_t {
    Apply = 0,      // A_i -> A_j(alpha)      rank 0, rho = A_j alpha
    Compose = 1,    // A_i -> A_j(A_k(x))     rank 1, rho = A_j A_k
    PairLeft = 2,   // A_i -> f(alpha, x)     rank 1, rho = alpha
    PairRight = 3,  // A_i -> f(x, alpha)     rank 1, rho = alpha
};

struct NormalRule {
    RuleType type;
    Symbol first;   // Apply/Compose: A_j; PairLeft/PairRight: alpha
    Symbol second;  // Apply: alpha; Compose: A_k; otherwise unused
    bool operator==(const NormalRule&) const = default;
};

/// Normal-form TSLP: indexed nonterminals A_0..A_{n-1}, one rule each of
/// the four permitted shapes. The singleton grammar G_a (A_0 -> a) is the
/// one permitted exception and carries no rules.
class NormalFormTslp {
public:
    NormalFormTslp() = default;
    explicit NormalFormTslp(std::vector<NormalRule> rules) : rules_(std::move(rules)) {
        for (NormalRule& r : rules_)  // `second` is meaningless for pair rules
            if (r.type == RuleType::PairLeft || r.type == RuleType::PairRight) r.second = kSymbolA;
    }

    static NormalFormTslp leaf_grammar() { return NormalFormTslp(); }

    bool is_leaf_grammar() const { return rules_.empty(); }
    std::size_t nonterminal_count() const { return is_leaf_grammar() ? 1 : rules_.size(); }
    const std::vector<NormalRule>& rules() const { return rules_; }
    const NormalRule& rule(std::size_t i) const { return rules_[i]; }

    /// 0 for Apply rules (tree-valued), 1 otherwise; G_a's A_0 has rank 0.
    int rank(std::size_t i) const;

    /// |G| = |rho_G|.
    std::uint64_t size() const;

    bool operator==(const NormalFormTslp& other) const = default;

private:
    std::vector<NormalRule> rules_;
};

/// Tree/context pattern over {f,a,x} union with nonterminals; the rhs
/// language of general TSLPs and the result type of eval_initial.
struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
    enum class Kind : std::uint8_t { LeafA, Hole, Node, Ref0, Ref1 };
    Kind kind;
    std::int32_t index = -1;  // nonterminal index for Ref0/Ref1
    PatternPtr left;          // Node: left child; Ref1: argument
    PatternPtr right;         // Node: right child

    static PatternPtr leaf_a();
    static PatternPtr hole();
    static PatternPtr node(PatternPtr l, PatternPtr r);
    static PatternPtr ref0(std::int32_t i);
    static PatternPtr ref1(std::int32_t i, PatternPtr arg);

    int hole_count() const;
};

std::string serialize_pattern(const Pattern& p);
bool pattern_equal(const Pattern& a, const Pattern& b);

/// General TSLP: rules indexed from the start nonterminal A_0; rank is
/// derived from the rhs (contains x => rank 1).
struct Tslp {
    struct Rule {
        PatternPtr rhs;
    };
    std::vector<Rule> rules;

    int rank(std::size_t i) const { return rules[i].rhs->hole_count(); }
};

/// One rule per line, e.g. `A0 -> f(A1,A2(a))`. Round-trips with
/// serialize_grammar.
Tslp parse_grammar(const std::string& text);
std::string serialize_grammar(const Tslp& g);
Tslp to_general(const NormalFormTslp& g);
std::string serialize_grammar(const NormalFormTslp& g);

Term eval(const Tslp& g);
Term eval(const NormalFormTslp& g);

/// val of a single nonterminal (a context for rank-1 nonterminals).
Term eval_nonterminal(const NormalFormTslp& g, std::size_t i);

std::vector<Symbol> rho_word(const NormalFormTslp& g);
std::vector<Symbol> omega_word(const NormalFormTslp& g);

/// Unnormalized empirical entropy of omega_G in bits.
double entropy(const NormalFormTslp& g);

/// Unnormalized empirical entropy of an arbitrary word.
double unnormalized_entropy(const std::vector<Symbol>& word);

struct Violation {
    std::string code;  // machine-readable, e.g. "rho-order", "val-collision"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool probabilistic_distinctness = false;  // val check fell back to fingerprints
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_normal_form(const NormalFormTslp& g);

/// Relabels nonterminals by first-occurrence order in the rho scan
/// starting from A_0. Input must be shape-valid and acyclic; throws
/// std::invalid_argument on unreachable nonterminals.
NormalFormTslp canonical_renumber(const NormalFormTslp& g);

/// General TSLP to normal form; eval is preserved and the result passes
/// validate_normal_form.
NormalFormTslp normalize(const Tslp& g);

struct DerivationTree {
    struct DNode {
        Symbol label;  // kSymbolA or nonterminal index
        std::vector<std::int32_t> children;
    };
    std::vector<DNode> nodes;
    std::int32_t root = 0;

    std::size_t leaf_count() const;
    std::vector<Symbol> leaf_labels_preorder() const;
};

/// Full derivation tree T_G; its leaf count equals |val(G)|, so keep the
/// grammar desk-scale.
DerivationTree derivation_tree(const NormalFormTslp& g);

/// Initial subtree T' in which every nonterminal is expanded exactly at
/// its first preorder occurrence: |G|+1 nodes, |V| non-leaf nodes.
DerivationTree first_occurrence_initial_subtree(const NormalFormTslp& g);

/// val_G(T') for an initial subtree T' of T_G.
PatternPtr eval_initial(const NormalFormTslp& g, const DerivationTree& tprime);

}  // namespace tslp
