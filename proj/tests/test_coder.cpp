#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "tslp/coder.hpp"
#include "tslp/dag.hpp"

using namespace tslp;

namespace {

NormalFormTslp fixture_normal() {
    return NormalFormTslp({
        {RuleType::Apply, 1, 2},
        {RuleType::PairRight, 3, kSymbolA},
        {RuleType::Apply, 4, 3},
        {RuleType::Apply, 4, kSymbolA},
        {RuleType::PairRight, kSymbolA, kSymbolA},
    });
}

}  // namespace

TEST_CASE("occurrence profile of the fixture") {
    OccurrenceProfile p = OccurrenceProfile::from_grammar(fixture_normal());
    CHECK(p.n == 5);
    CHECK(p.m == 8);
    CHECK(p.k == std::vector<std::uint64_t>{1, 1, 2, 2});
    CHECK(p.eta_a == 2);
    CHECK(p.eta == std::vector<std::uint64_t>{0, 0, 1, 1});
    CHECK(p.class_size() == 12);
    std::map<Symbol, std::uint64_t> want{{kSymbolA, 2}, {3, 1}, {4, 1}};
    CHECK(p.omega_counts() == want);
}

TEST_CASE("rank_multiset_word") {
    // fixture omega A_3 A_4 a a, alphabet a < A_3 < A_4
    CHECK(rank_multiset_word({3, 4, kSymbolA, kSymbolA}) == 8);
    CHECK(rank_multiset_word({kSymbolA, kSymbolA, 3, 4}) == 0);
    CHECK(rank_multiset_word({kSymbolA, kSymbolA, kSymbolA}) == 0);
    CHECK(rank_multiset_word({}) == 0);
    CHECK(rank_multiset_word({4, 3, kSymbolA, kSymbolA}) == 11);  // lexicographically last
}

TEST_CASE("rank/unrank round trip on small multisets") {
    // every multiset over 3 symbols with up to 7 elements
    for (int ca = 0; ca <= 3; ++ca)
        for (int cb = 0; cb <= 2; ++cb)
            for (int cc = 0; cc <= 2; ++cc) {
                if (ca + cb + cc == 0) continue;
                std::map<Symbol, std::uint64_t> counts;
                if (ca) counts[kSymbolA] = static_cast<std::uint64_t>(ca);
                if (cb) counts[1] = static_cast<std::uint64_t>(cb);
                if (cc) counts[2] = static_cast<std::uint64_t>(cc);
                std::vector<std::int64_t> cvec;
                BigInt total = 1;
                {
                    std::int64_t seen = 0;
                    for (auto& [s, c] : counts)
                        for (std::uint64_t j = 1; j <= c; ++j) {
                            total *= ++seen;
                            total /= static_cast<std::int64_t>(j);
                        }
                }
                std::set<std::string> words;
                for (BigInt i = 0; i < total; ++i) {
                    std::vector<Symbol> w = unrank_multiset_word(counts, i);
                    CHECK(rank_multiset_word(w) == i);
                    std::string key;
                    for (Symbol s : w) key += std::to_string(s) + ",";
                    words.insert(key);
                    if (i > 0) {
                        // lexicographic: previous word < current word
                        std::vector<Symbol> prev = unrank_multiset_word(counts, i - 1);
                        CHECK(prev < w);
                    }
                }
                CHECK(BigInt(words.size()) == total);
                CHECK_THROWS_AS(unrank_multiset_word(counts, total), std::out_of_range);
            }
}

TEST_CASE("encode the worked example bit-exactly") {
    BitString b = encode(fixture_normal());
    CHECK(b.to_string() == "00001" "0011000011" "11110000" "110101" "1000");
    CHECK(b.size() == 33);
}

TEST_CASE("encode corner cases") {
    CHECK(encode(NormalFormTslp::leaf_grammar()).to_string() == "1");
    // f(a,a): A_0 -> A_1(a), A_1 -> f(x,a)
    NormalFormTslp g({{RuleType::Apply, 1, kSymbolA}, {RuleType::PairRight, kSymbolA, kSymbolA}});
    CHECK(encode(g).to_string() == "01" "0011" "100" "1");  // empty w4, |S| = 1
    // invalid grammar rejected
    NormalFormTslp bad({{RuleType::Apply, 1, kSymbolA},
                        {RuleType::PairRight, kSymbolA, kSymbolA},
                        {RuleType::PairRight, kSymbolA, kSymbolA}});
    CHECK_THROWS_AS(encode(bad), std::invalid_argument);
}

TEST_CASE("decode") {
    auto [ga, used1] = decode(BitString::from_string("1"));
    CHECK(ga.is_leaf_grammar());
    CHECK(used1 == 1);

    BitString b = encode(fixture_normal());
    auto [g, used] = decode(b);
    CHECK(g == fixture_normal());
    CHECK(used == 33);

    // trailing bits beyond the code word are ignored
    BitString padded = b;
    padded.push_back(true);
    padded.push_back(false);
    auto [g2, used2] = decode(padded);
    CHECK(g2 == fixture_normal());
    CHECK(used2 == 33);

    CHECK_THROWS_AS(decode(BitString::from_string("0")), DecodeError);
    try {
        decode(BitString::from_string("0"));
    } catch (const DecodeError& e) {
        CHECK(e.kind == DecodeError::Kind::Truncated);
    }
}

TEST_CASE("decode error kinds are distinct") {
    // index out of range: fixture's w4 can hold 12..15 which exceed |S|-1
    BitString b = encode(fixture_normal());
    BitString bad;
    for (std::size_t i = 0; i < b.size() - 4; ++i) bad.push_back(b.bit(i));
    BitString tail = BitString::from_string("1111");  // index 15 >= 12
    bad.append(tail);
    try {
        decode(bad);
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.kind == DecodeError::Kind::IndexRange);
    }
}

TEST_CASE("round trip over compressed enumerations") {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            NormalFormTslp g = dag_to_normal_tslp(build_minimal_dag(t));
            BitString b = encode(g);
            auto [h, used] = decode(b);
            CHECK(h == g);
            CHECK(used == b.size());
            CHECK(eval(h) == t);
        }
    }
}

TEST_CASE("prefix freeness over the DAG-route corpus") {
    std::vector<BitString> codes;
    for (std::uint32_t n = 1; n <= 8; ++n)
        for (const Term& t : enumerate_trees(n))
            codes.push_back(encode(dag_to_normal_tslp(build_minimal_dag(t))));
    std::set<std::string> texts;
    for (const BitString& b : codes) texts.insert(b.to_string());
    std::vector<std::string> sorted(texts.begin(), texts.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        // in sorted order a proper prefix would sit immediately before an
        // extension of itself
        const std::string& a = sorted[i];
        const std::string& b = sorted[i + 1];
        const bool proper_prefix = b.size() > a.size() && b.compare(0, a.size(), a) == 0;
        CHECK_FALSE(proper_prefix);
    }
}

TEST_CASE("code length bound |B(G)| <= H(G) + 5|G| + 3") {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            NormalFormTslp g = dag_to_normal_tslp(build_minimal_dag(t));
            BitString b = encode(g);  // encode() itself asserts the bound
            CHECK(static_cast<double>(b.size()) <=
                  entropy(g) + 5.0 * static_cast<double>(g.size()) + 3.0 + 1e-9);
        }
    }
}

TEST_CASE("container round trip and errors") {
    NormalFormTslp g = fixture_normal();
    std::vector<std::uint8_t> bytes = write_container(g);
    CHECK(bytes.size() == 5 + 5);  // header + ceil(33/8)
    CHECK(read_container(bytes) == g);

    std::vector<std::uint8_t> ga_bytes = write_container(NormalFormTslp::leaf_grammar());
    REQUIRE(ga_bytes.size() == 6);
    CHECK(ga_bytes[5] == 0b10000000);
    CHECK(read_container(ga_bytes).is_leaf_grammar());

    auto expect_kind = [](std::vector<std::uint8_t> bs, DecodeError::Kind kind) {
        try {
            read_container(bs);
            FAIL_CHECK("expected DecodeError");
        } catch (const DecodeError& e) {
            CHECK(e.kind == kind);
        }
    };
    std::vector<std::uint8_t> bad_magic = bytes;
    bad_magic[0] ^= 0xFF;
    expect_kind(bad_magic, DecodeError::Kind::BadMagic);
    std::vector<std::uint8_t> bad_version = bytes;
    bad_version[4] = 0x02;
    expect_kind(bad_version, DecodeError::Kind::BadVersion);
    std::vector<std::uint8_t> bad_pad = bytes;
    bad_pad.back() |= 0x01;  // bit 40 > the 33-bit code word
    expect_kind(bad_pad, DecodeError::Kind::BadPadding);
    std::vector<std::uint8_t> trailing = bytes;
    trailing.push_back(0x00);
    expect_kind(trailing, DecodeError::Kind::TrailingData);
    expect_kind({0x54, 0x53}, DecodeError::Kind::Truncated);
}
