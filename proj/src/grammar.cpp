#include "tslp/grammar.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tslp {

int NormalFormTslp::rank(std::size_t i) const {
    if (is_leaf_grammar()) return 0;
    return rules_[i].type == RuleType::Apply ? 0 : 1;
}

std::uint64_t NormalFormTslp::size() const {
    if (is_leaf_grammar()) return 1;  // rho_{G_a} = a
    std::uint64_t m = 0;
    for (const NormalRule& r : rules_)
        m += (r.type == RuleType::Apply || r.type == RuleType::Compose) ? 2 : 1;
    return m;
}

namespace {
PatternPtr make_pattern(Pattern::Kind kind, std::int32_t index, PatternPtr l, PatternPtr r) {
    auto p = std::make_shared<Pattern>();
    p->kind = kind;
    p->index = index;
    p->left = std::move(l);
    p->right = std::move(r);
    return p;
}
}  // namespace

PatternPtr Pattern::leaf_a() {
    static PatternPtr p = make_pattern(Kind::LeafA, -1, nullptr, nullptr);
    return p;
}
PatternPtr Pattern::hole() {
    static PatternPtr p = make_pattern(Kind::Hole, -1, nullptr, nullptr);
    return p;
}
PatternPtr Pattern::node(PatternPtr l, PatternPtr r) {
    return make_pattern(Kind::Node, -1, std::move(l), std::move(r));
}
PatternPtr Pattern::ref0(std::int32_t i) { return make_pattern(Kind::Ref0, i, nullptr, nullptr); }
PatternPtr Pattern::ref1(std::int32_t i, PatternPtr arg) {
    return make_pattern(Kind::Ref1, i, std::move(arg), nullptr);
}

int Pattern::hole_count() const {
    int total = 0;
    std::vector<const Pattern*> stack{this};
    while (!stack.empty()) {
        const Pattern* p = stack.back();
        stack.pop_back();
        switch (p->kind) {
            case Kind::Hole: ++total; break;
            case Kind::Node:
                stack.push_back(p->left.get());
                stack.push_back(p->right.get());
                break;
            case Kind::Ref1: stack.push_back(p->left.get()); break;
            default: break;
        }
    }
    return total;
}

std::string serialize_pattern(const Pattern& p) {
    switch (p.kind) {
        case Pattern::Kind::LeafA: return "a";
        case Pattern::Kind::Hole: return "x";
        case Pattern::Kind::Ref0: return "A" + std::to_string(p.index);
        case Pattern::Kind::Ref1:
            return "A" + std::to_string(p.index) + "(" + serialize_pattern(*p.left) + ")";
        case Pattern::Kind::Node:
            return "f(" + serialize_pattern(*p.left) + "," + serialize_pattern(*p.right) + ")";
    }
    return {};
}

bool pattern_equal(const Pattern& a, const Pattern& b) {
    if (a.kind != b.kind || a.index != b.index) return false;
    if (a.left && !pattern_equal(*a.left, *b.left)) return false;
    if (a.right && !pattern_equal(*a.right, *b.right)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// rho / omega / entropy

std::vector<Symbol> rho_word(const NormalFormTslp& g) {
    std::vector<Symbol> rho;
    if (g.is_leaf_grammar()) {
        rho.push_back(kSymbolA);
        return rho;
    }
    for (const NormalRule& r : g.rules()) {
        switch (r.type) {
            case RuleType::Apply:
            case RuleType::Compose:
                rho.push_back(r.first);
                rho.push_back(r.second);
                break;
            case RuleType::PairLeft:
            case RuleType::PairRight:
                rho.push_back(r.first);
                break;
        }
    }
    return rho;
}

std::vector<Symbol> omega_word(const NormalFormTslp& g) {
    std::vector<Symbol> rho = rho_word(g);
    std::vector<bool> seen(g.nonterminal_count(), false);
    std::vector<Symbol> omega;
    for (Symbol s : rho) {
        if (s != kSymbolA && !seen[static_cast<std::size_t>(s)]) {
            seen[static_cast<std::size_t>(s)] = true;
            continue;
        }
        omega.push_back(s);
    }
    return omega;
}

double unnormalized_entropy(const std::vector<Symbol>& word) {
    if (word.empty()) return 0.0;
    std::map<Symbol, std::uint64_t> counts;
    for (Symbol s : word) ++counts[s];
    const double n = static_cast<double>(word.size());
    double h = 0.0;
    for (const auto& [sym, c] : counts) h += static_cast<double>(c) * std::log2(n / static_cast<double>(c));
    return h;
}

double entropy(const NormalFormTslp& g) { return unnormalized_entropy(omega_word(g)); }

// ---------------------------------------------------------------------------
// evaluation

namespace {

std::vector<Symbol> rule_refs(const NormalRule& r) {
    std::vector<Symbol> out;
    switch (r.type) {
        case RuleType::Apply:
        case RuleType::Compose:
            out.push_back(r.first);
            if (r.second != kSymbolA) out.push_back(r.second);
            break;
        case RuleType::PairLeft:
        case RuleType::PairRight:
            if (r.first != kSymbolA) out.push_back(r.first);
            break;
    }
    std::erase(out, kSymbolA);
    return out;
}

// reverse topological order of nonterminals (dependencies first); throws on cycle
std::vector<std::size_t> topo_order(std::size_t n,
                                    const std::function<std::vector<Symbol>(std::size_t)>& refs) {
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::size_t> order;
    for (std::size_t start = 0; start < n; ++start) {
        if (state[start] == 2) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
        state[start] = 1;
        while (!stack.empty()) {
            auto& [v, child] = stack.back();
            std::vector<Symbol> deps = refs(v);
            if (child < deps.size()) {
                std::size_t u = static_cast<std::size_t>(deps[child]);
                ++child;
                if (state[u] == 1) throw std::invalid_argument("grammar reference cycle");
                if (state[u] == 0) {
                    state[u] = 1;
                    stack.push_back({u, 0});
                }
            } else {
                state[v] = 2;
                order.push_back(v);
                stack.pop_back();
            }
        }
    }
    return order;
}

}  // namespace

Term eval_nonterminal(const NormalFormTslp& g, std::size_t which) {
    if (g.is_leaf_grammar()) return Term::leaf();
    const std::size_t n = g.nonterminal_count();
    auto refs = [&](std::size_t i) { return rule_refs(g.rule(i)); };
    std::vector<std::size_t> order = topo_order(n, refs);
    std::vector<Term> val(n);
    auto sym_term = [&](Symbol s) { return s == kSymbolA ? Term::leaf() : val[static_cast<std::size_t>(s)]; };
    for (std::size_t i : order) {
        const NormalRule& r = g.rule(i);
        switch (r.type) {
            case RuleType::Apply:
                val[i] = substitute(val[static_cast<std::size_t>(r.first)], sym_term(r.second));
                break;
            case RuleType::Compose:
                val[i] = substitute(val[static_cast<std::size_t>(r.first)],
                                    val[static_cast<std::size_t>(r.second)]);
                break;
            case RuleType::PairLeft:
                val[i] = Term::internal(sym_term(r.first), Term::hole());
                break;
            case RuleType::PairRight:
                val[i] = Term::internal(Term::hole(), sym_term(r.first));
                break;
        }
    }
    return val[which];
}

Term eval(const NormalFormTslp& g) { return eval_nonterminal(g, 0); }

Term eval(const Tslp& g) {
    const std::size_t n = g.rules.size();
    auto refs = [&](std::size_t i) {
        std::vector<Symbol> out;
        std::vector<const Pattern*> stack{g.rules[i].rhs.get()};
        while (!stack.empty()) {
            const Pattern* p = stack.back();
            stack.pop_back();
            if (p->kind == Pattern::Kind::Ref0 || p->kind == Pattern::Kind::Ref1)
                out.push_back(p->index);
            if (p->left) stack.push_back(p->left.get());
            if (p->right) stack.push_back(p->right.get());
        }
        return out;
    };
    std::vector<std::size_t> order = topo_order(n, refs);
    std::vector<Term> val(n);
    for (std::size_t i : order) {
        // evaluate the rhs pattern bottom-up with an explicit stack
        std::vector<std::pair<const Pattern*, bool>> stack{{g.rules[i].rhs.get(), false}};
        std::vector<Term> results;
        while (!stack.empty()) {
            auto [p, expanded] = stack.back();
            stack.pop_back();
            if (!expanded) {
                switch (p->kind) {
                    case Pattern::Kind::LeafA: results.push_back(Term::leaf()); break;
                    case Pattern::Kind::Hole: results.push_back(Term::hole()); break;
                    case Pattern::Kind::Ref0:
                        results.push_back(val[static_cast<std::size_t>(p->index)]);
                        break;
                    case Pattern::Kind::Ref1:
                        stack.push_back({p, true});
                        stack.push_back({p->left.get(), false});
                        break;
                    case Pattern::Kind::Node:
                        stack.push_back({p, true});
                        stack.push_back({p->right.get(), false});
                        stack.push_back({p->left.get(), false});
                        break;
                }
            } else if (p->kind == Pattern::Kind::Ref1) {
                Term arg = std::move(results.back());
                results.pop_back();
                results.push_back(substitute(val[static_cast<std::size_t>(p->index)], arg));
            } else {
                Term r = std::move(results.back());
                results.pop_back();
                Term l = std::move(results.back());
                results.pop_back();
                results.push_back(Term::internal(l, r));
            }
        }
        val[i] = std::move(results.back());
    }
    return val[0];
}

// ---------------------------------------------------------------------------
// grammar text format

namespace {

PatternPtr parse_pattern(const std::string& s, std::size_t& pos) {
    auto skip_ws = [&] { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; };
    skip_ws();
    if (pos >= s.size()) throw ParseError(pos, "unexpected end of rule");
    char c = s[pos];
    if (c == 'a') { ++pos; return Pattern::leaf_a(); }
    if (c == 'x') { ++pos; return Pattern::hole(); }
    if (c == 'f') {
        ++pos;
        skip_ws();
        if (pos >= s.size() || s[pos] != '(') throw ParseError(pos, "expected '('");
        ++pos;
        PatternPtr l = parse_pattern(s, pos);
        skip_ws();
        if (pos >= s.size() || s[pos] != ',') throw ParseError(pos, "expected ','");
        ++pos;
        PatternPtr r = parse_pattern(s, pos);
        skip_ws();
        if (pos >= s.size() || s[pos] != ')') throw ParseError(pos, "expected ')'");
        ++pos;
        return Pattern::node(std::move(l), std::move(r));
    }
    if (c == 'A') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError(pos, "expected nonterminal index");
        int idx = std::stoi(s.substr(start, pos - start));
        skip_ws();
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            PatternPtr arg = parse_pattern(s, pos);
            skip_ws();
            if (pos >= s.size() || s[pos] != ')') throw ParseError(pos, "expected ')'");
            ++pos;
            return Pattern::ref1(idx, std::move(arg));
        }
        return Pattern::ref0(idx);
    }
    throw ParseError(pos, std::string("unexpected character '") + c + "'");
}

}  // namespace

Tslp parse_grammar(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<int, PatternPtr> rhs_by_index;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto arrow = line.find("->");
        if (arrow == std::string::npos) throw std::invalid_argument("rule line without '->': " + line);
        std::string lhs = line.substr(0, arrow);
        std::size_t p = lhs.find('A');
        if (p == std::string::npos) throw std::invalid_argument("bad lhs: " + lhs);
        int idx = std::stoi(lhs.substr(p + 1));
        std::string rhs = line.substr(arrow + 2);
        std::size_t pos = 0;
        PatternPtr pat = parse_pattern(rhs, pos);
        while (pos < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[pos]))) ++pos;
        if (pos != rhs.size()) throw std::invalid_argument("trailing input in rule: " + line);
        if (!rhs_by_index.emplace(idx, std::move(pat)).second)
            throw std::invalid_argument("duplicate rule for A" + std::to_string(idx));
    }
    if (rhs_by_index.empty()) throw std::invalid_argument("empty grammar");
    Tslp g;
    int expect = 0;
    for (const auto& [idx, pat] : rhs_by_index) {
        if (idx != expect++) throw std::invalid_argument("non-contiguous nonterminal indices");
        g.rules.push_back({pat});
    }
    return g;
}

std::string serialize_grammar(const Tslp& g) {
    std::string out;
    for (std::size_t i = 0; i < g.rules.size(); ++i)
        out += "A" + std::to_string(i) + " -> " + serialize_pattern(*g.rules[i].rhs) + "\n";
    return out;
}

Tslp to_general(const NormalFormTslp& g) {
    Tslp out;
    if (g.is_leaf_grammar()) {
        out.rules.push_back({Pattern::leaf_a()});
        return out;
    }
    auto sym_pat = [](Symbol s) {
        return s == kSymbolA ? Pattern::leaf_a() : Pattern::ref0(s);
    };
    for (const NormalRule& r : g.rules()) {
        switch (r.type) {
            case RuleType::Apply:
                out.rules.push_back({Pattern::ref1(r.first, sym_pat(r.second))});
                break;
            case RuleType::Compose:
                out.rules.push_back({Pattern::ref1(r.first, Pattern::ref1(r.second, Pattern::hole()))});
                break;
            case RuleType::PairLeft:
                out.rules.push_back({Pattern::node(sym_pat(r.first), Pattern::hole())});
                break;
            case RuleType::PairRight:
                out.rules.push_back({Pattern::node(Pattern::hole(), sym_pat(r.first))});
                break;
        }
    }
    return out;
}

std::string serialize_grammar(const NormalFormTslp& g) { return serialize_grammar(to_general(g)); }

// ---------------------------------------------------------------------------
// validation

namespace {

// 61-bit prime field rolling hash over serialized terms. A context is the
// (prefix, suffix) pair of its serialization split at x, so substitution
// composes fingerprints exactly.
struct Fp {
    std::uint64_t h = 0;
    std::uint64_t pw = 1;  // base^(string length)
    bool operator==(const Fp&) const = default;
    bool operator<(const Fp& o) const { return std::tie(h, pw) < std::tie(o.h, o.pw); }
};

constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % kPrime);
}

std::uint64_t fp_base() {
    // chosen once per process; affects only probabilistic validation
    static std::uint64_t base = [] {
        std::random_device rd;
        std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
        return gen() % (kPrime - 4) + 2;
    }();
    return base;
}

Fp fp_char(char c) {
    return Fp{static_cast<std::uint64_t>(c), fp_base()};
}

Fp fp_concat(const Fp& a, const Fp& b) {
    return Fp{(mulmod(a.h, b.pw) + b.h) % kPrime, mulmod(a.pw, b.pw)};
}

Fp fp_string(const std::string& s) {
    Fp f;
    for (char c : s) f = fp_concat(f, fp_char(c));
    return f;
}

struct ValFp {
    Fp pre, suf;  // trees use pre only
};

// fingerprints of val(A_i) for all nonterminals, in any valid grammar
std::vector<ValFp> val_fingerprints(const NormalFormTslp& g, const std::vector<std::size_t>& order) {
    static const Fp kA = fp_string("a");
    static const Fp kFOpen = fp_string("f(");
    static const Fp kComma = fp_string(",");
    static const Fp kClose = fp_string(")");
    std::vector<ValFp> out(g.nonterminal_count());
    auto sym_fp = [&](Symbol s) { return s == kSymbolA ? kA : out[static_cast<std::size_t>(s)].pre; };
    for (std::size_t i : order) {
        const NormalRule& r = g.rule(i);
        const ValFp* j = r.first == kSymbolA ? nullptr : &out[static_cast<std::size_t>(r.first)];
        switch (r.type) {
            case RuleType::Apply:
                out[i].pre = fp_concat(fp_concat(j->pre, sym_fp(r.second)), j->suf);
                break;
            case RuleType::Compose: {
                const ValFp& k = out[static_cast<std::size_t>(r.second)];
                out[i].pre = fp_concat(j->pre, k.pre);
                out[i].suf = fp_concat(k.suf, j->suf);
                break;
            }
            case RuleType::PairLeft:
                out[i].pre = fp_concat(fp_concat(kFOpen, sym_fp(r.first)), kComma);
                out[i].suf = kClose;
                break;
            case RuleType::PairRight:
                out[i].pre = kFOpen;
                out[i].suf = fp_concat(fp_concat(kComma, sym_fp(r.first)), kClose);
                break;
        }
    }
    return out;
}

constexpr std::uint64_t kExactLimit = 1ULL << 16;

// val sizes in leaves, saturated at kExactLimit+1
std::vector<std::uint64_t> val_sizes(const NormalFormTslp& g, const std::vector<std::size_t>& order) {
    std::vector<std::uint64_t> sz(g.nonterminal_count(), 0);
    auto cap = [](std::uint64_t v) { return std::min(v, kExactLimit + 1); };
    auto sym_sz = [&](Symbol s) -> std::uint64_t {
        return s == kSymbolA ? 1 : sz[static_cast<std::size_t>(s)];
    };
    for (std::size_t i : order) {
        const NormalRule& r = g.rule(i);
        switch (r.type) {
            case RuleType::Apply:
            case RuleType::Compose:
                sz[i] = cap(sz[static_cast<std::size_t>(r.first)] +
                            (r.type == RuleType::Apply ? sym_sz(r.second)
                                                       : sz[static_cast<std::size_t>(r.second)]));
                break;
            case RuleType::PairLeft:
            case RuleType::PairRight:
                sz[i] = cap(sym_sz(r.first));
                break;
        }
    }
    return sz;
}

}  // namespace

ValidationReport validate_normal_form(const NormalFormTslp& g) {
    ValidationReport rep;
    if (g.is_leaf_grammar()) return rep;
    const std::size_t n = g.nonterminal_count();
    auto add = [&](const std::string& code, const std::string& detail) {
        rep.violations.push_back({code, detail});
    };
    // rank discipline; rank(i) is derived from rule type
    for (std::size_t i = 0; i < n; ++i) {
        const NormalRule& r = g.rule(i);
        auto check_ref = [&](Symbol s, int want_rank, const char* what) {
            if (s == kSymbolA) {
                if (want_rank == 1) add("rank", std::string(what) + " of A" + std::to_string(i) + " is a, expected rank-1 nonterminal");
                return;
            }
            if (s < 0 || static_cast<std::size_t>(s) >= n) {
                add("ref-range", "A" + std::to_string(i) + " references A" + std::to_string(s));
                return;
            }
            if (g.rank(static_cast<std::size_t>(s)) != want_rank)
                add("rank", std::string(what) + " of A" + std::to_string(i) + " has wrong rank");
        };
        switch (r.type) {
            case RuleType::Apply:
                if (r.first == kSymbolA) { add("rank", "A" + std::to_string(i) + ": A_j position holds a"); break; }
                check_ref(r.first, 1, "applied nonterminal");
                if (r.second != kSymbolA) check_ref(r.second, 0, "argument");
                break;
            case RuleType::Compose:
                if (r.first == kSymbolA || r.second == kSymbolA) { add("rank", "A" + std::to_string(i) + ": compose with a"); break; }
                check_ref(r.first, 1, "outer nonterminal");
                check_ref(r.second, 1, "inner nonterminal");
                break;
            case RuleType::PairLeft:
            case RuleType::PairRight:
                if (r.first != kSymbolA) check_ref(r.first, 0, "pair argument");
                break;
        }
    }
    if (g.rank(0) != 0) add("start-rank", "A_0 must have rank 0");
    if (!rep.violations.empty()) return rep;  // later checks assume shape validity
    std::vector<std::size_t> order;
    try {
        order = topo_order(n, [&](std::size_t i) { return rule_refs(g.rule(i)); });
    } catch (const std::invalid_argument&) {
        add("cycle", "reference relation is cyclic");
        return rep;
    }
    // rho ordering: first occurrences must be exactly A_1, A_2, ... in order,
    // starting at position 0, with A_0 never referenced
    std::vector<Symbol> rho = rho_word(g);
    Symbol next_expected = 1;
    std::vector<bool> seen(n, false);
    for (std::size_t pos = 0; pos < rho.size(); ++pos) {
        Symbol s = rho[pos];
        if (s == kSymbolA) continue;
        if (s == 0) { add("rho-alphabet", "A_0 occurs in rho_G"); continue; }
        if (!seen[static_cast<std::size_t>(s)]) {
            if (s != next_expected)
                add("rho-order", "first occurrence of A" + std::to_string(s) + " out of order at rho position " + std::to_string(pos));
            else if (s == 1 && pos != 0)
                add("rho-order", "rho_G must start with A_1");
            seen[static_cast<std::size_t>(s)] = true;
            if (s == next_expected) ++next_expected;
        }
    }
    for (std::size_t i = 1; i < n; ++i)
        if (!seen[i]) add("unreachable", "A" + std::to_string(i) + " never occurs in rho_G");
    // val distinctness
    std::vector<ValFp> fps = val_fingerprints(g, order);
    std::vector<std::uint64_t> sizes = val_sizes(g, order);
    std::map<std::pair<Fp, Fp>, std::vector<std::size_t>> groups[2];
    for (std::size_t i = 0; i < n; ++i)
        groups[g.rank(i)][{fps[i].pre, fps[i].suf}].push_back(i);
    for (int rk = 0; rk < 2; ++rk) {
        for (const auto& [key, members] : groups[rk]) {
            if (members.size() < 2) continue;
            bool all_small = true;
            for (std::size_t i : members) all_small &= sizes[i] <= kExactLimit;
            if (all_small) {
                // confirm exactly; fingerprint-equal pairs are almost surely equal
                Term v0 = eval_nonterminal(g, members[0]);
                for (std::size_t k = 1; k < members.size(); ++k) {
                    if (eval_nonterminal(g, members[k]) == v0)
                        add("val-collision", "val(A" + std::to_string(members[0]) + ") = val(A" + std::to_string(members[k]) + ")");
                }
            } else {
                rep.probabilistic_distinctness = true;
                add("val-collision", "fingerprint collision between A" + std::to_string(members[0]) + " and A" + std::to_string(members[1]) + " (probabilistic)");
            }
        }
    }
    if (rep.violations.empty()) {
        // distinctness of large vals was established probabilistically
        for (std::size_t i = 0; i < n && !rep.probabilistic_distinctness; ++i)
            rep.probabilistic_distinctness = sizes[i] > kExactLimit;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// canonical renumbering

NormalFormTslp canonical_renumber(const NormalFormTslp& g) {
    if (g.is_leaf_grammar()) return g;
    const std::size_t n = g.nonterminal_count();
    std::vector<std::int32_t> new_of_old(n, -1);
    std::vector<std::size_t> old_of_new;
    old_of_new.reserve(n);
    new_of_old[0] = 0;
    old_of_new.push_back(0);
    // scan rho segments in new-index rule order, assigning indices by
    // first occurrence
    for (std::size_t next = 0; next < old_of_new.size(); ++next) {
        const NormalRule& r = g.rule(old_of_new[next]);
        for (Symbol s : std::array<Symbol, 2>{r.first, r.type == RuleType::Apply || r.type == RuleType::Compose ? r.second : kSymbolA}) {
            if (s == kSymbolA) continue;
            auto u = static_cast<std::size_t>(s);
            if (new_of_old[u] == -1) {
                new_of_old[u] = static_cast<std::int32_t>(old_of_new.size());
                old_of_new.push_back(u);
            }
        }
    }
    if (old_of_new.size() != n) throw std::invalid_argument("unreachable nonterminal in grammar");
    std::vector<NormalRule> rules(n);
    for (std::size_t old = 0; old < n; ++old) {
        NormalRule r = g.rule(old);
        auto remap = [&](Symbol s) { return s == kSymbolA ? kSymbolA : Symbol(new_of_old[static_cast<std::size_t>(s)]); };
        r.first = remap(r.first);
        if (r.type == RuleType::Apply || r.type == RuleType::Compose) r.second = remap(r.second);
        rules[static_cast<std::size_t>(new_of_old[old])] = r;
    }
    return NormalFormTslp(std::move(rules));
}

// ---------------------------------------------------------------------------
// normalization of general TSLPs

namespace {

struct Emitter {
    std::map<std::tuple<RuleType, Symbol, Symbol>, Symbol> memo;
    std::vector<NormalRule> rules;

    Symbol emit(RuleType type, Symbol first, Symbol second) {
        auto key = std::make_tuple(type, first, second);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Symbol id = static_cast<Symbol>(rules.size());
        rules.push_back({type, first, second});
        memo.emplace(key, id);
        return id;
    }
};

struct Normalizer {
    const Tslp& g;
    Emitter em;
    // per original nonterminal: resolved symbol; rank-0: kSymbolA or emitted
    // tree nonterminal; rank-1: emitted context nonterminal or kIdentity
    static constexpr Symbol kIdentity = -2;
    std::vector<std::optional<Symbol>> resolved;

    explicit Normalizer(const Tslp& grammar) : g(grammar), resolved(grammar.rules.size()) {}

    Symbol resolve(std::size_t i) {
        if (resolved[i]) return *resolved[i];
        // mark to catch cycles
        resolved[i] = Symbol(-100);
        const PatternPtr& rhs = g.rules[i].rhs;
        Symbol s = rhs->hole_count() == 0 ? emit_tree(*rhs) : emit_ctx(*rhs);
        resolved[i] = s;
        return s;
    }

    Symbol sym_of(std::size_t i) {
        Symbol s = resolve(i);
        if (s == Symbol(-100)) throw std::invalid_argument("grammar reference cycle");
        return s;
    }

    // returns kSymbolA or a rank-0 nonterminal
    Symbol emit_tree(const Pattern& p) {
        switch (p.kind) {
            case Pattern::Kind::LeafA: return kSymbolA;
            case Pattern::Kind::Ref0: return sym_of(static_cast<std::size_t>(p.index));
            case Pattern::Kind::Node: {
                // right-leaning: A -> C(left) with C -> f(x, right)
                Symbol ctx = emit_ctx_shell_right(*p.right);
                Symbol arg = emit_tree(*p.left);
                return em.emit(RuleType::Apply, ctx, arg);
            }
            case Pattern::Kind::Ref1: {
                Symbol ctx = sym_of(static_cast<std::size_t>(p.index));
                if (p.left->hole_count() != 0) throw std::invalid_argument("pattern rank mismatch");
                Symbol arg = emit_tree(*p.left);
                if (ctx == kIdentity) return arg;
                return em.emit(RuleType::Apply, ctx, arg);
            }
            default: throw std::invalid_argument("hole in tree pattern");
        }
    }

    Symbol emit_ctx_shell_right(const Pattern& p) {  // context f(x, p)
        return em.emit(RuleType::PairRight, emit_tree(p), kSymbolA);
    }

    // returns a rank-1 nonterminal, or kIdentity for the bare hole
    Symbol emit_ctx(const Pattern& p) {
        switch (p.kind) {
            case Pattern::Kind::Hole: return kIdentity;
            case Pattern::Kind::Ref1: {
                Symbol outer = sym_of(static_cast<std::size_t>(p.index));
                Symbol inner = emit_ctx(*p.left);
                if (inner == kIdentity) return outer;
                if (outer == kIdentity) return inner;
                return em.emit(RuleType::Compose, outer, inner);
            }
            case Pattern::Kind::Node: {
                const bool hole_left = p.left->hole_count() == 1;
                const Pattern& hole_side = hole_left ? *p.left : *p.right;
                const Pattern& tree_side = hole_left ? *p.right : *p.left;
                if (hole_side.kind == Pattern::Kind::Hole) {
                    Symbol alpha = emit_tree(tree_side);
                    return em.emit(hole_left ? RuleType::PairRight : RuleType::PairLeft, alpha, kSymbolA);
                }
                Symbol shell =
                    em.emit(hole_left ? RuleType::PairRight : RuleType::PairLeft, emit_tree(tree_side), kSymbolA);
                Symbol inner = emit_ctx(hole_side);
                if (inner == kIdentity) return shell;  // unreachable: hole_side is not the bare hole
                return em.emit(RuleType::Compose, shell, inner);
            }
            default: throw std::invalid_argument("context pattern expected");
        }
    }
};

}  // namespace

NormalFormTslp normalize(const Tslp& g) {
    if (g.rules.empty()) throw std::invalid_argument("empty grammar");
    if (g.rules[0].rhs->hole_count() != 0) throw std::invalid_argument("start nonterminal must be tree-valued");
    Normalizer nz(g);
    Symbol start = nz.emit_tree(*g.rules[0].rhs);
    if (start == kSymbolA) return NormalFormTslp::leaf_grammar();
    // move the start rule to index 0, then merge equal-val nonterminals
    std::vector<NormalRule> rules = std::move(nz.em.rules);
    std::swap(rules[0], rules[static_cast<std::size_t>(start)]);
    auto fix = [&](Symbol s) {
        if (s == start) return Symbol(0);
        if (s == 0) return start;
        return s;
    };
    for (NormalRule& r : rules) {
        r.first = r.first == kSymbolA ? kSymbolA : fix(r.first);
        if (r.type == RuleType::Apply || r.type == RuleType::Compose)
            r.second = r.second == kSymbolA ? kSymbolA : fix(r.second);
    }
    NormalFormTslp cand(rules);
    // merge nonterminals with equal val (possible when distinct original
    // nonterminals derive the same tree)
    const std::size_t n = cand.nonterminal_count();
    auto order = topo_order(n, [&](std::size_t i) { return rule_refs(cand.rule(i)); });
    std::vector<ValFp> fps = val_fingerprints(cand, order);
    std::vector<Symbol> rep(n);
    // assign the topologically earliest member as representative, except the
    // start which always represents its own group
    std::map<std::tuple<int, Fp, Fp>, Symbol> pick;
    auto key_of = [&](std::size_t i) { return std::make_tuple(cand.rank(i), fps[i].pre, fps[i].suf); };
    pick[key_of(0)] = 0;
    for (std::size_t i : order) pick.try_emplace(key_of(i), static_cast<Symbol>(i));
    for (std::size_t i = 0; i < n; ++i) rep[i] = pick[key_of(i)];
    std::vector<NormalRule> merged(n);
    for (std::size_t i = 0; i < n; ++i) {
        NormalRule r = cand.rule(i);
        auto remap = [&](Symbol s) { return s == kSymbolA ? kSymbolA : rep[static_cast<std::size_t>(s)]; };
        r.first = remap(r.first);
        if (r.type == RuleType::Apply || r.type == RuleType::Compose) r.second = remap(r.second);
        merged[i] = r;
    }
    // drop nonterminals orphaned by the merge, then renumber
    std::vector<bool> reach(n, false);
    std::vector<std::size_t> work{0};
    reach[0] = true;
    while (!work.empty()) {
        std::size_t v = work.back();
        work.pop_back();
        for (Symbol s : rule_refs(merged[v])) {
            auto u = static_cast<std::size_t>(s);
            if (!reach[u]) {
                reach[u] = true;
                work.push_back(u);
            }
        }
    }
    std::vector<Symbol> compact(n, kSymbolA);
    std::vector<NormalRule> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reach[i]) continue;
        compact[i] = static_cast<Symbol>(kept.size());
        kept.push_back(merged[i]);
    }
    for (NormalRule& r : kept) {
        auto remap2 = [&](Symbol s) { return s == kSymbolA ? kSymbolA : compact[static_cast<std::size_t>(s)]; };
        r.first = remap2(r.first);
        if (r.type == RuleType::Apply || r.type == RuleType::Compose) r.second = remap2(r.second);
    }
    return canonical_renumber(NormalFormTslp(std::move(kept)));
}

// ---------------------------------------------------------------------------
// derivation trees

namespace {

std::vector<Symbol> rho_segment(const NormalRule& r) {
    if (r.type == RuleType::Apply || r.type == RuleType::Compose) return {r.first, r.second};
    return {r.first};
}

}  // namespace

std::size_t DerivationTree::leaf_count() const {
    std::size_t total = 0;
    for (const DNode& n : nodes) total += n.children.empty();
    return total;
}

std::vector<Symbol> DerivationTree::leaf_labels_preorder() const {
    std::vector<Symbol> out;
    std::vector<std::int32_t> stack{root};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        const DNode& n = nodes[static_cast<std::size_t>(v)];
        if (n.children.empty()) out.push_back(n.label);
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

namespace {

DerivationTree expand_derivation(const NormalFormTslp& g, bool first_occurrence_only) {
    DerivationTree t;
    t.nodes.push_back({Symbol(0), {}});
    if (g.is_leaf_grammar()) {
        t.nodes.push_back({kSymbolA, {}});
        t.nodes[0].children.push_back(1);
        return t;
    }
    std::vector<bool> expanded(g.nonterminal_count(), false);
    std::vector<std::int32_t> stack{0};  // preorder expansion
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        Symbol label = t.nodes[static_cast<std::size_t>(v)].label;
        if (label == kSymbolA) continue;
        auto idx = static_cast<std::size_t>(label);
        if (first_occurrence_only) {
            if (expanded[idx]) continue;
            expanded[idx] = true;
        }
        std::vector<Symbol> seg = rho_segment(g.rule(idx));
        for (Symbol s : seg) {
            t.nodes.push_back({s, {}});
            t.nodes[static_cast<std::size_t>(v)].children.push_back(
                static_cast<std::int32_t>(t.nodes.size()) - 1);
        }
        const auto& ch = t.nodes[static_cast<std::size_t>(v)].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return t;
}

}  // namespace

DerivationTree derivation_tree(const NormalFormTslp& g) { return expand_derivation(g, false); }

DerivationTree first_occurrence_initial_subtree(const NormalFormTslp& g) {
    return expand_derivation(g, true);
}

PatternPtr eval_initial(const NormalFormTslp& g, const DerivationTree& tprime) {
    if (g.is_leaf_grammar()) return Pattern::leaf_a();
    // bottom-up over tprime; verify labels against the rules as we go
    std::vector<PatternPtr> val(tprime.nodes.size());
    // children come after parents in the node array (built by expansion),
    // so a reverse index scan is bottom-up
    for (std::size_t i = tprime.nodes.size(); i-- > 0;) {
        const DerivationTree::DNode& nd = tprime.nodes[i];
        if (nd.label == kSymbolA) {
            if (!nd.children.empty()) throw std::invalid_argument("a-labelled node with children");
            val[i] = Pattern::leaf_a();
            continue;
        }
        auto idx = static_cast<std::size_t>(nd.label);
        const NormalRule& r = g.rule(idx);
        if (nd.children.empty()) {
            val[i] = g.rank(idx) == 0 ? Pattern::ref0(nd.label)
                                      : Pattern::ref1(nd.label, Pattern::hole());
            continue;
        }
        std::vector<Symbol> seg = rho_segment(r);
        if (seg.size() != nd.children.size()) throw std::invalid_argument("not an initial subtree: arity mismatch");
        for (std::size_t k = 0; k < seg.size(); ++k)
            if (tprime.nodes[static_cast<std::size_t>(nd.children[k])].label != seg[k])
                throw std::invalid_argument("not an initial subtree: label mismatch");
        if (seg.size() == 1) {
            // r is f(alpha,x) or f(x,alpha); the child derives alpha
            PatternPtr u = val[static_cast<std::size_t>(nd.children[0])];
            val[i] = r.type == RuleType::PairLeft ? Pattern::node(u, Pattern::hole())
                                                  : Pattern::node(Pattern::hole(), u);
        } else {
            // t_v = t_{u1}(t_{u2}): substitute the right pattern into the
            // left pattern's hole
            PatternPtr l = val[static_cast<std::size_t>(nd.children[0])];
            PatternPtr rr = val[static_cast<std::size_t>(nd.children[1])];
            // substitute rr at the hole of l
            struct Sub {
                static PatternPtr apply(const PatternPtr& p, const PatternPtr& repl) {
                    switch (p->kind) {
                        case Pattern::Kind::Hole: return repl;
                        case Pattern::Kind::Node: {
                            if (p->left->hole_count() > 0)
                                return Pattern::node(apply(p->left, repl), p->right);
                            if (p->right->hole_count() > 0)
                                return Pattern::node(p->left, apply(p->right, repl));
                            return p;
                        }
                        case Pattern::Kind::Ref1:
                            if (p->left->hole_count() > 0)
                                return Pattern::ref1(p->index, apply(p->left, repl));
                            return p;
                        default: return p;
                    }
                }
            };
            val[i] = Sub::apply(l, rr);
        }
    }
    return val[0];
}

}  // namespace tslp
