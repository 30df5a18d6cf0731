#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "tslp/term.hpp"

using namespace tslp;

TEST_CASE("parse basic terms") {
    CHECK(parse_term("a").is_tree());
    CHECK(parse_term("a").size() == 1);
    CHECK(parse_term("x").is_context());
    CHECK(parse_term("x").size() == 0);

    Term t = parse_term("f(a,f(a,a))");
    CHECK(t.is_tree());
    CHECK(t.size() == 3);
    CHECK(t.depth() == 2);
    CHECK(serialize_term(t) == "f(a,f(a,a))");

    Term c = parse_term("f(a,x)");
    CHECK(c.is_context());
    CHECK(c.size() == 1);

    CHECK(parse_term(" f( a , f(a, a) ) ") == t);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_term("f(x,x)"), ParseError);
    CHECK_THROWS_AS(parse_term(""), ParseError);
    CHECK_THROWS_AS(parse_term("f(a)"), ParseError);
    CHECK_THROWS_AS(parse_term("f(a,a"), ParseError);
    CHECK_THROWS_AS(parse_term("f(a,a))"), ParseError);
    CHECK_THROWS_AS(parse_term("g(a,a)"), ParseError);
    try {
        parse_term("f(a,b)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.pos == 4);
    }
}

TEST_CASE("substitute") {
    Term s = parse_term("f(a,x)");
    Term t = parse_term("f(a,a)");
    CHECK(serialize_term(substitute(s, t)) == "f(a,f(a,a))");
    CHECK(substitute(parse_term("x"), t) == t);
    CHECK(serialize_term(substitute(parse_term("f(x,a)"), parse_term("f(x,a)"))) ==
          "f(f(x,a),a)");
    // size additivity
    CHECK(substitute(s, t).size() == s.size() + t.size());
    // tree iff argument is tree
    CHECK(substitute(s, t).is_tree());
    CHECK(substitute(s, parse_term("x")).is_context());
}

TEST_CASE("substitute associativity on small enumerations") {
    for (const Term& s1 : enumerate_contexts(1)) {
        for (const Term& s2 : enumerate_contexts(2)) {
            for (const Term& t : enumerate_trees(2)) {
                CHECK(substitute(s1, substitute(s2, t)) == substitute(substitute(s1, s2), t));
            }
        }
    }
}

TEST_CASE("enumerate_trees canonical order and counts") {
    auto t1 = enumerate_trees(1);
    REQUIRE(t1.size() == 1);
    CHECK(serialize_term(t1[0]) == "a");

    auto t3 = enumerate_trees(3);
    REQUIRE(t3.size() == 2);
    CHECK(serialize_term(t3[0]) == "f(f(a,a),a)");
    CHECK(serialize_term(t3[1]) == "f(a,f(a,a))");

    CHECK(enumerate_trees(5).size() == 14);
    CHECK_THROWS_AS(enumerate_trees(0), std::invalid_argument);

    for (std::uint32_t n = 1; n <= 12; ++n) {
        auto ts = enumerate_trees(n);
        CHECK(BigInt(ts.size()) == catalan(n - 1));
        std::set<std::string> distinct;
        for (const Term& t : ts) {
            CHECK(t.size() == n);
            distinct.insert(serialize_term(t));
        }
        CHECK(distinct.size() == ts.size());
    }
}

TEST_CASE("enumerate_contexts") {
    auto c0 = enumerate_contexts(0);
    REQUIRE(c0.size() == 1);
    CHECK(serialize_term(c0[0]) == "x");

    auto c1 = enumerate_contexts(1);
    REQUIRE(c1.size() == 2);
    CHECK(serialize_term(c1[0]) == "f(x,a)");
    CHECK(serialize_term(c1[1]) == "f(a,x)");

    // n a-leaves plus the hole leaf: Catalan(n) shapes, n+1 hole positions
    auto c2 = enumerate_contexts(2);
    CHECK(c2.size() == 6);

    for (std::uint32_t n = 0; n <= 6; ++n) {
        auto cs = enumerate_contexts(n);
        CHECK(BigInt(cs.size()) == BigInt(n + 1) * catalan(n));
        std::set<std::string> distinct;
        for (const Term& c : cs) {
            CHECK(c.is_context());
            CHECK(c.size() == n);
            distinct.insert(serialize_term(c));
        }
        CHECK(distinct.size() == cs.size());
    }
}

TEST_CASE("round trip on enumerations up to n=10") {
    for (std::uint32_t n = 1; n <= 10; ++n)
        for (const Term& t : enumerate_trees(n)) CHECK(parse_term(serialize_term(t)) == t);
    for (std::uint32_t n = 0; n <= 5; ++n)
        for (const Term& c : enumerate_contexts(n)) CHECK(parse_term(serialize_term(c)) == c);
}

TEST_CASE("catalan") {
    CHECK(catalan(0) == 1);
    CHECK(catalan(1) == 1);
    CHECK(catalan(3) == 5);
    CHECK(catalan(12) == 208012);
    CHECK(catalan(100) == BigInt("896519947090131496687170070074100632420837521538745909320"));
}

TEST_CASE("count_trees_by_depth") {
    CHECK(count_trees_by_depth(0) == 1);
    CHECK(count_trees_by_depth(1) == 1);
    CHECK(count_trees_by_depth(2) == 3);
    CHECK(count_trees_by_depth(4) == 651);
    CHECK(count_trees_by_depth(5) == 457653);
    for (std::uint32_t d = 0; d <= 4; ++d) {
        auto ts = enumerate_trees_by_depth(d);
        CHECK(BigInt(ts.size()) == count_trees_by_depth(d));
        for (const Term& t : ts) CHECK(t.depth() == d);
    }
}

TEST_CASE("caterpillar and deep traversals") {
    Term t = Term::caterpillar(4);
    CHECK(serialize_term(t) == "f(f(f(f(a,a),a),a),a)");
    CHECK(t.size() == 5);
    CHECK(t.depth() == 4);

    // degenerate chains beyond default recursion limits must work
    Term big = Term::caterpillar(1 << 17);
    CHECK(big.size() == (1u << 17) + 1);
    CHECK(big.depth() == (1u << 17));
    std::string s = serialize_term(big);
    CHECK(parse_term(s) == big);
}

TEST_CASE("is_beta_balanced") {
    CHECK(is_beta_balanced(parse_term("f(a,a)"), 1.0));
    CHECK_FALSE(is_beta_balanced(Term::caterpillar(4), 1.0));
    // every node perfectly balanced
    Term perfect = parse_term("f(f(a,a),f(a,a))");
    CHECK(is_beta_balanced(perfect, 1.0));
    // caterpillars are 3-balanced everywhere? no: f^4 has |t1|=4,|t2|=1 at root
    CHECK(is_beta_balanced(Term::caterpillar(2), 2.0));
    CHECK(is_beta_balanced(Term::caterpillar(4), 4.0));
}

TEST_CASE("is_beta_depth_balanced and the size lower bound") {
    CHECK(is_beta_depth_balanced(parse_term("f(a,a)"), 0));
    CHECK_FALSE(is_beta_depth_balanced(parse_term("f(f(f(a,a),a),a)"), 1));
    for (std::uint32_t n = 1; n <= 12; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            for (std::uint64_t beta = 0; beta <= 3; ++beta) {
                if (is_beta_depth_balanced(t, beta)) {
                    double c = 1.0 + 1.0 / (1.0 + static_cast<double>(beta));
                    CHECK(static_cast<double>(t.size()) >=
                          std::pow(c, static_cast<double>(t.depth())) - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("punch_hole and subterm") {
    Term t = parse_term("f(f(a,a),a)");
    // punch each leaf in turn and resubstitute
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(t.node_count()); ++id) {
        if (t.node(id).kind != Term::NodeKind::Leaf) continue;
        Term c = t.punch_hole(id);
        CHECK(c.is_context());
        CHECK(substitute(c, Term::leaf()) == t);
    }
    // punching an internal node removes its whole subtree
    Term whole = parse_term("f(f(a,a),a)");
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(whole.node_count()); ++id) {
        Term sub = whole.subterm(id);
        Term ctx = whole.punch_hole(id);
        CHECK(substitute(ctx, sub) == whole);
    }
}
