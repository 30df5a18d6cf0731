#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tslp/bitstring.hpp"
#include "tslp/grammar.hpp"

namespace tslp {

struct DecodeError : std::runtime_error {
    enum class Kind {
        Truncated,     // stream ended inside a code word
        IndexRange,    // enumerative index >= class size
        Inconsistent,  // decoded words do not form a valid grammar
        BadMagic,
        BadVersion,
        BadPadding,    // nonzero padding bits
        TrailingData,  // bytes beyond the padded code word
    };
    DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
    Kind kind;
};

/// rho/omega occurrence counts of a grammar: k_i occurrences of A_i in
/// rho, eta the per-symbol counts of omega (eta(A_i) = k_i - 1).
struct OccurrenceProfile {
    std::size_t n = 1;                // nonterminal count
    std::uint64_t m = 1;              // |G| = |rho|
    std::vector<std::uint64_t> k;     // k[i-1] = occurrences of A_i, i in 1..n-1
    std::uint64_t eta_a = 0;
    std::vector<std::uint64_t> eta;   // eta[i-1] = k_i - 1

    static OccurrenceProfile from_grammar(const NormalFormTslp& g);

    /// |S| = (m-n+1)! / (eta_a! * prod eta(A_i)!), the number of words
    /// with omega's symbol counts.
    BigInt class_size() const;

    /// Symbol counts of omega as a map (a plus every A_i with eta > 0).
    std::map<Symbol, std::uint64_t> omega_counts() const;
};

/// Index of w in the lexicographic enumeration of all permutations of
/// its symbol multiset; symbols compare numerically (a < A_1 < A_2 < ...).
BigInt rank_multiset_word(const std::vector<Symbol>& w);

/// Inverse of rank_multiset_word for the given symbol counts. Throws
/// std::out_of_range when index >= the number of permutations.
std::vector<Symbol> unrank_multiset_word(const std::map<Symbol, std::uint64_t>& counts,
                                         const BigInt& index);

/// Prefix-free binary code word for a normal-form grammar. Requires
/// validate_normal_form(g) to pass (throws std::invalid_argument).
BitString encode(const NormalFormTslp& g);

/// Decodes one code word from the front of `bits`; returns the grammar
/// and the number of bits consumed. Bits past the code word are ignored.
std::pair<NormalFormTslp, std::size_t> decode(const BitString& bits);

/// File container: magic "TSLP", version 0x01, then the code word packed
/// MSB-first with zero padding to a byte boundary.
std::vector<std::uint8_t> write_container(const NormalFormTslp& g);
NormalFormTslp read_container(const std::vector<std::uint8_t>& bytes);

}  // namespace tslp
