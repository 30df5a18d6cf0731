#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tslp/bitstring.hpp"
#include "tslp/compressor.hpp"
#include "tslp/sources.hpp"
#include "tslp/term.hpp"

namespace tslp {

// end-to-end tree encoders: compress to a grammar, then emit its codeword
enum class EncoderId { Tslp, Dag };

BitString encode_tree(EncoderId enc, const Term& t);
Term decode_tree(const BitString& bits);

// worst-case pointwise redundancy of an encoder against a source, over one
// partition class: max over the class of (|E(t)| + log2 P(t)) / |t|
struct RedundancyReport {
    std::uint64_t class_index = 0;
    std::uint64_t min_size = 0;    // smallest tree size in the class
    std::uint64_t count = 0;       // trees inspected
    bool exact = false;            // sampled values are lower bounds
    double value = 0.0;
    std::string witness;           // extremal tree, serialized
    double average = 0.0;          // probability-weighted mean, exact mode only
};

RedundancyReport redundancy_exact(EncoderId enc, const TreeSource& src,
                                  std::uint64_t class_index, std::uint64_t budget);
RedundancyReport redundancy_sampled(EncoderId enc, const TreeSource& src,
                                    std::uint64_t class_index,
                                    std::uint64_t samples, std::uint64_t seed);

struct CheckReport {
    std::vector<std::string> findings;  // violated inequalities
    std::vector<std::string> skipped;   // items outside a precondition
    bool ok() const { return findings.empty(); }
};

// the four domination-weight conditions, exhaustively up to n_max leaves
// (the product conditions are capped at combined size 8)
CheckReport verify_domination(const TreeSource& src, std::uint32_t n_max);

// per-sample entropy and code-length bounds:
//   H(G) <= -log2 P(t) + (1 + log2 c1) m + (2 + c2) m log2(n/m)
//   |B(G)| <= H(G) + 5 m + 3
// with (c1,c2) = (8,1) for leaf-centric and (8,2) for depth-centric
// sources; grammars with m > n are reported as skipped
CheckReport verify_entropy_bound(const TreeSource& src, EncoderId enc,
                                 const std::vector<std::uint64_t>& class_indices,
                                 std::uint64_t samples, std::uint64_t seed);

}  // namespace tslp
