#include "tslp/term.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <utility>

namespace tslp {

double log2_bigint(const BigInt& x) {
    assert(x > 0);
    const auto bits = boost::multiprecision::msb(x);
    if (bits <= 62) return std::log2(static_cast<double>(x.convert_to<std::uint64_t>()));
    // top 62 bits as mantissa
    BigInt top = x >> (bits - 62);
    return std::log2(static_cast<double>(top.convert_to<std::uint64_t>())) +
           static_cast<double>(bits - 62);
}

double log2_rational(const BigRational& r) {
    return log2_bigint(boost::multiprecision::numerator(r)) -
           log2_bigint(boost::multiprecision::denominator(r));
}

Term Term::leaf() {
    Term t;
    t.nodes_.assign(1, Node{kNoChild, kNoChild, NodeKind::Leaf});
    t.root_ = 0;
    t.size_ = 1;
    t.depth_ = 0;
    t.hole_count_ = 0;
    return t;
}

Term Term::hole() {
    Term t;
    t.nodes_.assign(1, Node{kNoChild, kNoChild, NodeKind::Hole});
    t.root_ = 0;
    t.size_ = 0;
    t.depth_ = 0;
    t.hole_count_ = 1;
    return t;
}

Term Term::internal(const Term& left, const Term& right) {
    if (left.hole_count_ + right.hole_count_ > 1)
        throw std::invalid_argument("internal: more than one hole");
    Term t;
    t.nodes_.reserve(left.nodes_.size() + right.nodes_.size() + 1);
    t.nodes_ = left.nodes_;
    const auto shift = static_cast<std::int32_t>(left.nodes_.size());
    for (const Node& n : right.nodes_) {
        Node m = n;
        if (m.left != kNoChild) m.left += shift;
        if (m.right != kNoChild) m.right += shift;
        t.nodes_.push_back(m);
    }
    t.nodes_.push_back(Node{left.root_, right.root_ + shift, NodeKind::Internal});
    t.root_ = static_cast<std::int32_t>(t.nodes_.size()) - 1;
    t.size_ = left.size_ + right.size_;
    t.depth_ = std::max(left.depth_, right.depth_) + 1;
    t.hole_count_ = left.hole_count_ + right.hole_count_;
    return t;
}

Term Term::caterpillar(std::size_t num_f) {
    Term t;
    if (num_f == 0) return leaf();
    // nodes: 0..num_f leaves interleaved with internal nodes, built bottom-up
    t.nodes_.clear();
    t.nodes_.push_back(Node{kNoChild, kNoChild, NodeKind::Leaf});
    t.nodes_.push_back(Node{kNoChild, kNoChild, NodeKind::Leaf});
    t.nodes_.push_back(Node{0, 1, NodeKind::Internal});
    std::int32_t cur = 2;
    for (std::size_t i = 1; i < num_f; ++i) {
        t.nodes_.push_back(Node{kNoChild, kNoChild, NodeKind::Leaf});
        t.nodes_.push_back(Node{cur, static_cast<std::int32_t>(t.nodes_.size()) - 1,
                                NodeKind::Internal});
        cur = static_cast<std::int32_t>(t.nodes_.size()) - 1;
    }
    t.root_ = cur;
    t.size_ = num_f + 1;
    t.depth_ = num_f;
    t.hole_count_ = 0;
    return t;
}

void Term::recompute_metrics() {
    // post-order accumulation without recursion; arenas have children
    // at lower indices than parents by construction
    std::vector<std::uint64_t> sz(nodes_.size()), dp(nodes_.size());
    std::vector<int> hc(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.kind == NodeKind::Internal) {
            sz[i] = sz[static_cast<std::size_t>(n.left)] + sz[static_cast<std::size_t>(n.right)];
            dp[i] = std::max(dp[static_cast<std::size_t>(n.left)],
                             dp[static_cast<std::size_t>(n.right)]) + 1;
            hc[i] = hc[static_cast<std::size_t>(n.left)] + hc[static_cast<std::size_t>(n.right)];
        } else {
            sz[i] = n.kind == NodeKind::Leaf ? 1 : 0;
            dp[i] = 0;
            hc[i] = n.kind == NodeKind::Hole ? 1 : 0;
        }
    }
    size_ = sz[static_cast<std::size_t>(root_)];
    depth_ = dp[static_cast<std::size_t>(root_)];
    hole_count_ = hc[static_cast<std::size_t>(root_)];
}

Term Term::subterm(std::int32_t id) const {
    Term out;
    out.nodes_.clear();
    // iterative copy, children first
    std::vector<std::int32_t> order;
    std::vector<std::pair<std::int32_t, bool>> stack{{id, false}};
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            order.push_back(v);
            continue;
        }
        stack.push_back({v, true});
        const Node& n = node(v);
        if (n.kind == NodeKind::Internal) {
            stack.push_back({n.right, false});
            stack.push_back({n.left, false});
        }
    }
    std::vector<std::int32_t> remap(nodes_.size(), kNoChild);
    for (std::int32_t v : order) {
        const Node& n = node(v);
        Node m = n;
        if (n.kind == NodeKind::Internal) {
            m.left = remap[static_cast<std::size_t>(n.left)];
            m.right = remap[static_cast<std::size_t>(n.right)];
        }
        remap[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(out.nodes_.size());
        out.nodes_.push_back(m);
    }
    out.root_ = remap[static_cast<std::size_t>(id)];
    out.recompute_metrics();
    return out;
}

Term Term::punch_hole(std::int32_t id) const {
    if (hole_count_ == 1 && !subtree_has_hole(id))
        throw std::invalid_argument("punch_hole: the result would have two holes");
    Term out = *this;
    // replace the subterm at id by a hole node in place; unreachable old
    // nodes stay in the arena, which is harmless
    out.nodes_[static_cast<std::size_t>(id)] = Node{kNoChild, kNoChild, NodeKind::Hole};
    out.recompute_metrics();
    return out;
}

std::uint64_t Term::subtree_size(std::int32_t id) const {
    std::uint64_t total = 0;
    std::vector<std::int32_t> stack{id};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        const Node& n = node(v);
        if (n.kind == NodeKind::Internal) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        } else if (n.kind == NodeKind::Leaf) {
            ++total;
        }
    }
    return total;
}

std::uint64_t Term::subtree_depth(std::int32_t id) const {
    std::uint64_t best = 0;
    std::vector<std::pair<std::int32_t, std::uint64_t>> stack{{id, 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        const Node& n = node(v);
        if (n.kind == NodeKind::Internal) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        } else {
            best = std::max(best, d);
        }
    }
    return best;
}

bool Term::subtree_has_hole(std::int32_t id) const {
    if (hole_count_ == 0) return false;
    std::vector<std::int32_t> stack{id};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        const Node& n = node(v);
        if (n.kind == NodeKind::Hole) return true;
        if (n.kind == NodeKind::Internal) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return false;
}

bool Term::operator==(const Term& other) const {
    if (size_ != other.size_ || depth_ != other.depth_ || hole_count_ != other.hole_count_)
        return false;
    std::vector<std::pair<std::int32_t, std::int32_t>> stack{{root_, other.root_}};
    while (!stack.empty()) {
        auto [u, v] = stack.back();
        stack.pop_back();
        const Node& a = node(u);
        const Node& b = other.node(v);
        if (a.kind != b.kind) return false;
        if (a.kind == NodeKind::Internal) {
            stack.push_back({a.left, b.left});
            stack.push_back({a.right, b.right});
        }
    }
    return true;
}

std::uint64_t Term::structural_hash() const {
    // bottom-up mixing; arena order has children before parents
    std::vector<std::uint64_t> h(nodes_.size());
    auto mix = [](std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.kind == NodeKind::Leaf)
            h[i] = 0x9e3779b97f4a7c15ULL;
        else if (n.kind == NodeKind::Hole)
            h[i] = 0xbf58476d1ce4e5b9ULL;
        else
            h[i] = mix(h[static_cast<std::size_t>(n.left)] * 3 +
                       mix(h[static_cast<std::size_t>(n.right)] + 0x94d049bb133111ebULL));
    }
    return h[static_cast<std::size_t>(root_)];
}

Term parse_term(std::string_view text) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                                     text[pos] == '\r'))
            ++pos;
    };
    // shift-reduce over an explicit frame stack to keep deep chains safe
    struct Frame {
        int stage = 0;  // 0: want left, 1: want right
        Term left;
    };
    std::vector<Frame> frames;
    Term result;
    bool have_result = false;
    int holes_seen = 0;
    for (;;) {
        skip_ws();
        if (pos >= text.size()) throw ParseError(pos, "unexpected end of input");
        char c = text[pos];
        Term atom;
        bool got_atom = false;
        if (c == 'a') {
            ++pos;
            atom = Term::leaf();
            got_atom = true;
        } else if (c == 'x') {
            ++pos;
            if (++holes_seen > 1) throw ParseError(pos - 1, "multiple holes");
            atom = Term::hole();
            got_atom = true;
        } else if (c == 'f') {
            ++pos;
            skip_ws();
            if (pos >= text.size() || text[pos] != '(') throw ParseError(pos, "expected '('");
            ++pos;
            frames.push_back(Frame{});
            continue;
        } else {
            throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        // reduce completed atoms against the frame stack
        while (got_atom) {
            if (frames.empty()) {
                result = atom;
                have_result = true;
                got_atom = false;
                break;
            }
            Frame& f = frames.back();
            if (f.stage == 0) {
                f.left = atom;
                f.stage = 1;
                skip_ws();
                if (pos >= text.size() || text[pos] != ',') throw ParseError(pos, "expected ','");
                ++pos;
                got_atom = false;
            } else {
                skip_ws();
                if (pos >= text.size() || text[pos] != ')') throw ParseError(pos, "expected ')'");
                ++pos;
                atom = Term::internal(f.left, atom);
                frames.pop_back();
            }
        }
        if (have_result) break;
    }
    skip_ws();
    if (pos != text.size()) throw ParseError(pos, "trailing input");
    return result;
}

std::string serialize_term(const Term& t) {
    std::string out;
    out.reserve(t.node_count() * 2);
    // encoded preorder walk: positive = enter node, negative-1 = emit ",", -2 = emit ")"
    std::vector<std::int64_t> stack{t.root()};
    while (!stack.empty()) {
        std::int64_t v = stack.back();
        stack.pop_back();
        if (v == -1) {
            out.push_back(',');
            continue;
        }
        if (v == -2) {
            out.push_back(')');
            continue;
        }
        const auto& n = t.node(static_cast<std::int32_t>(v));
        switch (n.kind) {
            case Term::NodeKind::Leaf:
                out.push_back('a');
                break;
            case Term::NodeKind::Hole:
                out.push_back('x');
                break;
            case Term::NodeKind::Internal:
                out += "f(";
                stack.push_back(-2);
                stack.push_back(n.right);
                stack.push_back(-1);
                stack.push_back(n.left);
                break;
        }
    }
    return out;
}

Term substitute(const Term& s, const Term& t) {
    if (!s.is_context()) throw std::invalid_argument("substitute: first argument must be a context");
    Term out;
    out.nodes_.clear();
    out.nodes_.reserve(s.node_count() + t.node_count());
    // copy t, then s with the hole rewired to t's root
    out.nodes_ = t.nodes_;
    const auto shift = static_cast<std::int32_t>(t.nodes_.size());
    std::int32_t hole_remap = t.root_;
    std::vector<std::int32_t> remap(s.node_count(), Term::kNoChild);
    for (std::size_t i = 0; i < s.node_count(); ++i) {
        const Term::Node& n = s.nodes_[i];
        if (n.kind == Term::NodeKind::Hole) {
            remap[i] = hole_remap;
            continue;
        }
        Term::Node m = n;
        if (n.kind == Term::NodeKind::Internal) {
            m.left = remap[static_cast<std::size_t>(n.left)];
            m.right = remap[static_cast<std::size_t>(n.right)];
        }
        remap[i] = static_cast<std::int32_t>(out.nodes_.size());
        out.nodes_.push_back(m);
    }
    (void)shift;
    out.root_ = remap[static_cast<std::size_t>(s.root_)];
    out.recompute_metrics();
    return out;
}

std::vector<Term> enumerate_trees(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("enumerate_trees: n must be >= 1");
    std::vector<std::vector<Term>> memo(n + 1);
    memo[1] = {Term::leaf()};
    for (std::uint32_t sz = 2; sz <= n; ++sz) {
        for (std::uint32_t ls = sz - 1; ls >= 1; --ls) {
            for (const Term& l : memo[ls])
                for (const Term& r : memo[sz - ls]) memo[sz].push_back(Term::internal(l, r));
        }
    }
    return memo[n];
}

std::vector<Term> enumerate_contexts(std::uint32_t n) {
    std::vector<std::vector<Term>> ctx(n + 1), tre(n + 1);
    ctx[0] = {Term::hole()};
    for (std::uint32_t sz = 1; sz <= n; ++sz) tre[sz] = enumerate_trees(sz);
    for (std::uint32_t sz = 1; sz <= n; ++sz) {
        // hole in the left child, left context size descending
        for (std::uint32_t i = sz; i-- > 0;)
            for (const Term& c : ctx[i])
                for (const Term& t : tre[sz - i]) ctx[sz].push_back(Term::internal(c, t));
        // hole in the right child, left tree size descending
        for (std::uint32_t i = sz; i >= 1; --i)
            for (const Term& t : tre[i])
                for (const Term& c : ctx[sz - i]) ctx[sz].push_back(Term::internal(t, c));
    }
    return ctx[n];
}

std::vector<Term> enumerate_trees_by_depth(std::uint32_t d) {
    // trees of depth <= k, memoized per k
    std::vector<std::vector<Term>> le(d + 1);
    le[0] = {Term::leaf()};
    for (std::uint32_t k = 1; k <= d; ++k) {
        le[k] = le[k - 1];
        for (const Term& l : le[k - 1])
            for (const Term& r : le[k - 1])
                if (l.depth() == k - 1 || r.depth() == k - 1)
                    le[k].push_back(Term::internal(l, r));
    }
    std::vector<Term> out;
    for (const Term& t : le[d])
        if (t.depth() == d) out.push_back(t);
    return out;
}

BigInt count_trees_by_depth(std::uint32_t d) {
    BigInt le = 1;  // |T^{<=0}|
    BigInt prev = 0;
    for (std::uint32_t k = 1; k <= d; ++k) {
        prev = le;
        le = 1 + le * le;
    }
    return d == 0 ? BigInt(1) : le - prev;
}

BigInt catalan(std::uint64_t n) {
    // C_{k+1} = C_k * 2(2k+1)/(k+2), memoized (hot path of nth_tree)
    static std::vector<BigInt> cache{1};
    while (cache.size() <= n) {
        const std::uint64_t k = cache.size() - 1;
        cache.push_back(cache.back() * (2 * (2 * k + 1)) / (k + 2));
    }
    return cache[n];
}

Term nth_tree(std::uint32_t n, const BigInt& index) {
    if (n == 0) throw std::invalid_argument("nth_tree: n must be >= 1");
    if (index < 0 || index >= catalan(n - 1)) throw std::out_of_range("nth_tree: index");
    // mirror enumerate_trees' order: left size descending, then the left
    // subtree's rank, then the right subtree's rank
    struct Task {
        std::uint32_t n;
        BigInt idx;
    };
    // build with an explicit stack; results combine children-first
    std::vector<std::pair<Task, int>> stack{{Task{n, index}, 0}};
    std::vector<Term> results;
    while (!stack.empty()) {
        auto& [task, stage] = stack.back();
        if (stage == 1) {
            Term r = std::move(results.back());
            results.pop_back();
            Term l = std::move(results.back());
            results.pop_back();
            results.push_back(Term::internal(l, r));
            stack.pop_back();
            continue;
        }
        if (task.n == 1) {
            results.push_back(Term::leaf());
            stack.pop_back();
            continue;
        }
        BigInt idx = task.idx;
        std::uint32_t ls = task.n - 1;
        for (;; --ls) {
            BigInt block = catalan(ls - 1) * catalan(task.n - ls - 1);
            if (idx < block) break;
            idx -= block;
        }
        BigInt right_count = catalan(task.n - ls - 1);
        BigInt left_idx = idx / right_count;
        BigInt right_idx = idx % right_count;
        std::uint32_t rs = task.n - ls;
        stage = 1;
        // push right then left so the left result lands first
        stack.push_back({Task{rs, right_idx}, 0});
        stack.push_back({Task{ls, left_idx}, 0});
    }
    return results.back();
}

bool is_beta_balanced(const Term& t, double beta) {
    if (!t.is_tree()) throw std::invalid_argument("is_beta_balanced: expects a tree");
    const std::size_t nn = t.node_count();
    std::vector<std::uint64_t> sz(nn, 0);
    std::vector<bool> node_balanced(nn, false);
    for (std::size_t i = 0; i < nn; ++i) {
        const auto& n = t.node(static_cast<std::int32_t>(i));
        if (n.kind == Term::NodeKind::Internal) {
            const auto a = sz[static_cast<std::size_t>(n.left)];
            const auto b = sz[static_cast<std::size_t>(n.right)];
            sz[i] = a + b;
            node_balanced[i] = static_cast<double>(a) <= beta * static_cast<double>(b) &&
                               static_cast<double>(b) <= beta * static_cast<double>(a);
        } else {
            sz[i] = 1;
        }
    }
    // every internal parent/child edge needs a balanced endpoint
    for (std::size_t i = 0; i < nn; ++i) {
        const auto& n = t.node(static_cast<std::int32_t>(i));
        if (n.kind != Term::NodeKind::Internal) continue;
        for (std::int32_t ch : {n.left, n.right}) {
            if (t.node(ch).kind != Term::NodeKind::Internal) continue;
            if (!node_balanced[i] && !node_balanced[static_cast<std::size_t>(ch)]) return false;
        }
    }
    return true;
}

bool is_beta_depth_balanced(const Term& t, std::uint64_t beta) {
    if (!t.is_tree()) throw std::invalid_argument("is_beta_depth_balanced: expects a tree");
    const std::size_t nn = t.node_count();
    std::vector<std::uint64_t> dp(nn, 0);
    for (std::size_t i = 0; i < nn; ++i) {
        const auto& n = t.node(static_cast<std::int32_t>(i));
        if (n.kind != Term::NodeKind::Internal) continue;
        const auto a = dp[static_cast<std::size_t>(n.left)];
        const auto b = dp[static_cast<std::size_t>(n.right)];
        dp[i] = std::max(a, b) + 1;
        if ((a > b ? a - b : b - a) > beta) return false;
    }
    return true;
}

}  // namespace tslp
