#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tslp/bigint.hpp"

namespace tslp {

/// Thrown by parse_term on malformed input. `pos` is a 0-based offset
/// into the input text.
struct ParseError : std::runtime_error {
    ParseError(std::size_t pos, const std::string& what)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), pos(pos) {}
    std::size_t pos;
};

/// A binary tree over {f,a}, or a one-hole context over {f,a,x}.
///
/// A Term with hole_count() == 0 is a tree, with hole_count() == 1 a
/// context whose hole sits at a leaf position. Values are immutable after
/// construction. Nodes live in a flat arena so that all traversals are
/// iterative; degenerate chains of 2^16+ leaves are fine.
class Term {
public:
    static constexpr std::int32_t kNoChild = -1;

    enum class NodeKind : std::uint8_t { Leaf, Hole, Internal };

    struct Node {
        std::int32_t left = kNoChild;
        std::int32_t right = kNoChild;
        NodeKind kind = NodeKind::Leaf;
    };

    Term() : nodes_(1, Node{kNoChild, kNoChild, NodeKind::Leaf}), size_(1) {}

    static Term leaf();
    static Term hole();
    static Term internal(const Term& left, const Term& right);

    /// Left-leaning chain f(f(...f(a,a)...,a),a) with `num_f` internal
    /// nodes and num_f+1 leaves.
    static Term caterpillar(std::size_t num_f);

    bool is_tree() const { return hole_count_ == 0; }
    bool is_context() const { return hole_count_ == 1; }

    /// Number of a-labelled leaves. The hole does not count.
    std::uint64_t size() const { return size_; }
    std::uint64_t depth() const { return depth_; }
    int hole_count() const { return hole_count_; }

    std::int32_t root() const { return root_; }
    std::size_t node_count() const { return nodes_.size(); }
    const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }

    /// Subterm rooted at `id` as a standalone value.
    Term subterm(std::int32_t id) const;

    /// Copy of this term with the subterm at `id` replaced by the hole.
    /// On a context, punching at or above the existing hole keeps the
    /// hole count at one; the result is always a valid context.
    Term punch_hole(std::int32_t id) const;

    /// Number of a-leaves below `id`.
    std::uint64_t subtree_size(std::int32_t id) const;
    std::uint64_t subtree_depth(std::int32_t id) const;
    bool subtree_has_hole(std::int32_t id) const;

    bool operator==(const Term& other) const;
    bool operator!=(const Term& other) const { return !(*this == other); }

    std::uint64_t structural_hash() const;

private:
    std::vector<Node> nodes_;
    std::int32_t root_ = 0;
    std::uint64_t size_ = 0;
    std::uint64_t depth_ = 0;
    int hole_count_ = 0;

    void recompute_metrics();
    friend Term substitute(const Term&, const Term&);
};

/// Parses `a`, `x`, or `f(<term>,<term>)`. Whitespace is tolerated
/// anywhere, never emitted by serialize_term. Returns a tree when no x
/// occurs and a context when exactly one x occurs at a leaf.
Term parse_term(std::string_view text);

std::string serialize_term(const Term& t);

/// Replaces the hole of context `s` by `t` (tree or context).
Term substitute(const Term& s, const Term& t);

/// All trees with exactly n leaves, in canonical order: left-subtree
/// size descending, then recursively. Exactly catalan(n-1) results.
std::vector<Term> enumerate_trees(std::uint32_t n);

/// All contexts with exactly n a-leaves: hole-in-left combinations
/// first (left size descending), then hole-in-right.
std::vector<Term> enumerate_contexts(std::uint32_t n);

/// All trees of depth exactly d. Grows doubly exponentially; keep d small.
std::vector<Term> enumerate_trees_by_depth(std::uint32_t d);

/// |T^d| without enumeration, via |T^{<=d}| = 1 + |T^{<=d-1}|^2.
BigInt count_trees_by_depth(std::uint32_t d);

BigInt catalan(std::uint64_t n);

/// The index-th tree of enumerate_trees(n)'s canonical order, without
/// materializing the enumeration; 0 <= index < catalan(n-1).
Term nth_tree(std::uint32_t n, const BigInt& index);

/// A node w with subtrees t1,t2 is beta-balanced iff |t1| <= beta*|t2|
/// and |t2| <= beta*|t1|. The tree is beta-balanced iff for every edge
/// between internal nodes at least one endpoint is beta-balanced.
bool is_beta_balanced(const Term& t, double beta);

/// True iff every internal node satisfies |d(t1)-d(t2)| <= beta.
bool is_beta_depth_balanced(const Term& t, std::uint64_t beta);

}  // namespace tslp
