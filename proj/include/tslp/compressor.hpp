#pragma once

#include <cstdint>

#include "tslp/grammar.hpp"
#include "tslp/term.hpp"

namespace tslp {

enum class CompressorId {
    Bisection,  // balanced splitting with piece memoization
    DagRoute,   // minimal DAG converted to a normal-form grammar
};

/// Produces a normal-form grammar with eval(result) = t; deterministic
/// for equal inputs.
NormalFormTslp compress(const Term& t, CompressorId which);

/// gamma(n) = max over trees with n leaves of |G_t| / n, exact over the
/// full enumeration. Throws std::length_error when catalan(n-1) exceeds
/// `budget` trees.
double gamma_exhaustive(CompressorId which, std::uint32_t n, std::uint64_t budget);

/// Maximum of |G_t| / n over `count` trees drawn uniformly from the
/// n-leaf trees with the given seed; a lower bound on gamma(n).
double gamma_sampled(CompressorId which, std::uint32_t n, std::uint64_t count,
                     std::uint64_t seed);

}  // namespace tslp
