#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tslp/compressor.hpp"
#include "tslp/dag.hpp"
#include "tslp/grammar.hpp"
#include "tslp/random.hpp"
#include "tslp/term.hpp"

using namespace tslp;

TEST_CASE("single leaf compresses to the one-nonterminal grammar") {
    for (auto which : {CompressorId::Bisection, CompressorId::DagRoute}) {
        NormalFormTslp g = compress(Term::leaf(), which);
        CHECK(g.is_leaf_grammar());
        CHECK(g.size() == 1);
        CHECK(eval(g) == Term::leaf());
    }
}

TEST_CASE("smallest branching tree") {
    Term t = parse_term("f(a,a)");
    NormalFormTslp g = compress(t, CompressorId::Bisection);
    CHECK(eval(g) == t);
    CHECK(g.size() == 3);
    CHECK(validate_normal_form(g).ok());
}

TEST_CASE("compress rejects contexts") {
    CHECK_THROWS_AS(compress(parse_term("f(x,a)"), CompressorId::Bisection),
                    std::invalid_argument);
}

TEST_CASE("lossless and well formed on all small trees") {
    for (std::uint32_t n = 1; n <= 10; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            for (auto which : {CompressorId::Bisection, CompressorId::DagRoute}) {
                NormalFormTslp g = compress(t, which);
                REQUIRE(eval(g) == t);
                ValidationReport rep = validate_normal_form(g);
                REQUIRE(rep.ok());
            }
        }
    }
}

TEST_CASE("lossless on sampled large trees") {
    std::mt19937_64 rng(20260826);
    for (std::uint32_t n : {64u, 257u, 1024u, 4096u}) {
        BigInt total = catalan(n - 1);
        for (int rep = 0; rep < 8; ++rep) {
            Term t = nth_tree(n, uniform_bigint_below(rng, total));
            for (auto which : {CompressorId::Bisection, CompressorId::DagRoute}) {
                NormalFormTslp g = compress(t, which);
                REQUIRE(eval(g) == t);
                REQUIRE(validate_normal_form(g).ok());
            }
        }
    }
}

TEST_CASE("every nonterminal derives a distinct piece, so rules are shared") {
    // with n leaves there are at most 2n-1 distinct subtrees, yet a grammar
    // for a deep caterpillar must stay much smaller than the tree
    for (std::uint32_t k = 4; k <= 14; ++k) {
        std::uint32_t n = 1u << k;
        Term t = Term::caterpillar(n - 1);
        NormalFormTslp g = compress(t, CompressorId::Bisection);
        CHECK(eval(g) == t);
        // logarithmic growth: generous linear-in-k envelope
        CHECK(g.size() <= 12 * k + 8);
    }
}

TEST_CASE("dag route matches the minimal dag size up to constant factor") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Term t = nth_tree(200, uniform_bigint_below(rng, catalan(199)));
        BigInt d = dag_size(build_minimal_dag(t));
        NormalFormTslp g = compress(t, CompressorId::DagRoute);
        CHECK(BigInt(g.size()) <= 4 * d);
    }
}

TEST_CASE("worst-case ratio over all trees of a fixed size") {
    CHECK(gamma_exhaustive(CompressorId::Bisection, 1, 10) == doctest::Approx(1.0));
    CHECK(gamma_exhaustive(CompressorId::Bisection, 2, 10) == doctest::Approx(1.5));
    CHECK_THROWS_AS(gamma_exhaustive(CompressorId::Bisection, 40, 1000),
                    std::length_error);
}

TEST_CASE("sampled worst-case ratio is reproducible and bounded") {
    double g1 = gamma_sampled(CompressorId::Bisection, 64, 50, 99);
    double g2 = gamma_sampled(CompressorId::Bisection, 64, 50, 99);
    CHECK(g1 == g2);
    CHECK(g1 > 0.0);
    CHECK(g1 <= 3.0);
}

TEST_CASE("exhaustive ratio trend over growing sizes") {
    double prev = 1e9;
    for (std::uint32_t n : {8u, 10u, 12u}) {
        double g = gamma_exhaustive(CompressorId::Bisection, n, 1u << 20);
        CHECK(g <= prev + 0.25);  // allow small non-monotone wiggle
        CHECK(g <= 3.0);
        prev = g;
    }
}
