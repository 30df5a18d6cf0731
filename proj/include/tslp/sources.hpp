#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "tslp/bigint.hpp"
#include "tslp/term.hpp"

namespace tslp {

// A probability distribution over binary trees, factored through a split
// distribution sigma. Leaf-centric sources split on leaf counts (classes
// indexed by size), depth-centric sources split on depths (classes indexed
// by depth).
struct TreeSource {
    enum class Kind { LeafCentric, DepthCentric };

    Kind kind;
    std::string name;
    // sigma(i, j): split weight; arguments are child sizes (leaf-centric,
    // i,j >= 1) or child depths (depth-centric, i,j >= 0)
    std::function<BigRational(std::uint64_t, std::uint64_t)> sigma;
    // optional closed-form inverse CDF for the split at a given class
    // parameter (size n >= 2, or target depth d >= 1); u in [0,1)
    std::function<std::pair<std::uint64_t, std::uint64_t>(std::uint64_t, double)> pick_split;
};

TreeSource bst_source();
TreeSource depth_uniform_source();
TreeSource leaf_balanced_source(double c);          // c >= 2
TreeSource depth_balanced_source(std::uint64_t c);  // c >= 0
TreeSource table_source(const std::string& path);

// "bst", "depth-uniform", "leaf-balanced:<c>", "depth-balanced:<c>",
// "table:<file>"
TreeSource parse_source(const std::string& spec);

// probability of a tree (exact, and as log base 2 with -inf for zero)
BigRational prob_tree(const TreeSource& src, const Term& t);
double prob_tree_log2(const TreeSource& src, const Term& t);

// extension to contexts: the hole has size 0 with sigma(0,k)=sigma(k,0)=1
// for leaf-centric sources, and depth 0 for depth-centric ones
BigRational prob_context(const TreeSource& src, const Term& c);
double prob_context_log2(const TreeSource& src, const Term& c);

// domination weight max{1/C_|u|, P(u)}; |u| counts a-leaves and C_0 = 1
BigRational lambda_value(const TreeSource& src, const Term& u);

// draw a tree from the class with the given index (leaf-centric: size
// index+1; depth-centric: depth index); deterministic in (index, seed)
Term sample(const TreeSource& src, std::uint64_t class_index, std::uint64_t seed);

// sigma(i,j) >= sigma(i,j+1) and sigma(i,j) >= sigma(i+1,j) for all
// arguments up to bound
bool check_monotone(const TreeSource& src, std::uint64_t bound);

// support predicates: (i+j)/min(i,j) <= c, and |i-j| <= c respectively
bool is_leaf_balanced(const TreeSource& src, double c, std::uint64_t bound);
bool is_depth_balanced(const TreeSource& src, std::uint64_t c, std::uint64_t bound);

}  // namespace tslp
