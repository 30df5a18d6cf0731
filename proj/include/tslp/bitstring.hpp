#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tslp/bigint.hpp"

namespace tslp {

/// Bit sequence with exact length; byte padding happens only at the
/// container boundary.
class BitString {
public:
    BitString() = default;

    /// Parses a literal like "0011".
    static BitString from_string(const std::string& s) {
        BitString b;
        for (char c : s) b.push_back(c == '1');
        return b;
    }

    /// Unpacks MSB-first packed bytes; keeps exactly `bit_count` bits.
    static BitString from_bytes_msb(const std::vector<std::uint8_t>& bytes,
                                    std::size_t bit_count) {
        BitString b;
        b.bits_.reserve(bit_count);
        for (std::size_t i = 0; i < bit_count; ++i)
            b.push_back((bytes[i / 8] >> (7 - i % 8)) & 1);
        return b;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool bit(std::size_t i) const { return bits_[i] != 0; }

    void push_back(bool b) { bits_.push_back(b ? 1 : 0); }

    void append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    void append_zeros(std::size_t count) { bits_.insert(bits_.end(), count, 0); }

    /// Big-endian fixed-width append; requires value < 2^width.
    void append_uint(const BigInt& value, std::size_t width) {
        for (std::size_t i = width; i-- > 0;)
            push_back(boost::multiprecision::bit_test(value, static_cast<unsigned>(i)));
    }

    /// MSB-first packing, zero-padded to a byte boundary.
    std::vector<std::uint8_t> to_bytes_msb() const {
        std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
        return out;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (std::uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    bool operator==(const BitString&) const = default;

    /// True iff `prefix` equals the first prefix.size() bits of this.
    bool starts_with(const BitString& prefix) const {
        if (prefix.size() > size()) return false;
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (bits_[i] != prefix.bits_[i]) return false;
        return true;
    }

private:
    std::vector<std::uint8_t> bits_;  // one entry per bit
};

}  // namespace tslp
