#pragma once

#include <random>

#include "tslp/bigint.hpp"

namespace tslp {

/// Uniform draw from [0, bound) by rejection on fixed-width bit blocks.
/// Uses raw engine output only, so results are identical on every
/// platform (standard distribution templates are not portable).
inline BigInt uniform_bigint_below(std::mt19937_64& rng, const BigInt& bound) {
    if (bound <= 1) return 0;
    const unsigned bits = boost::multiprecision::msb(bound - 1) + 1;
    for (;;) {
        BigInt v = 0;
        for (unsigned got = 0; got < bits; got += 64) {
            v <<= 64;
            v |= BigInt(rng());
        }
        v >>= (64 - bits % 64) % 64;
        if (v < bound) return v;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tslp
