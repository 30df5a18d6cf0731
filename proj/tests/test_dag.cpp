#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "tslp/dag.hpp"

using namespace tslp;

namespace {

// brute-force oracle: number of distinct subtrees by serialized text
std::uint64_t distinct_subtrees(const Term& t) {
    std::set<std::string> seen;
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(t.node_count()); ++id)
        seen.insert(serialize_term(t.subterm(id)));
    return seen.size();
}

}  // namespace

TEST_CASE("singleton DAG") {
    Dag d = build_minimal_dag(Term::leaf());
    CHECK(d.is_singleton());
    CHECK(dag_size(d) == 1);
    CHECK(unfold(d) == Term::leaf());
    CHECK(dag_to_normal_tslp(d).is_leaf_grammar());
}

TEST_CASE("shared subtree") {
    Term t = parse_term("f(f(a,a),f(a,a))");
    Dag d = build_minimal_dag(t);
    REQUIRE(d.rules.size() == 2);
    CHECK(d.rules[0] == Dag::Rule{1, 1});
    CHECK(d.rules[1] == Dag::Rule{kSymbolA, kSymbolA});
    CHECK(dag_size(d) == 3);
    CHECK(unfold(d) == t);
}

TEST_CASE("caterpillar DAG sizes") {
    CHECK(dag_size(build_minimal_dag(Term::caterpillar(3))) == 4);
    for (std::size_t n : {1u, 2u, 7u, 64u, 4096u}) {
        Term t = Term::caterpillar(n);
        Dag d = build_minimal_dag(t);
        CHECK(dag_size(d) == n + 1);
        CHECK(unfold(d) == t);
    }
}

TEST_CASE("dag_size equals the distinct-subtree count, n <= 10") {
    for (std::uint32_t n = 1; n <= 10; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            Dag d = build_minimal_dag(t);
            CHECK(dag_size(d) == distinct_subtrees(t));
            CHECK(unfold(d) == t);
        }
    }
}

TEST_CASE("canonical indices and idempotence") {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            Dag d = build_minimal_dag(t);
            // index constraint: references point forward
            for (std::size_t i = 0; i < d.rules.size(); ++i) {
                if (d.rules[i].left != kSymbolA) CHECK(d.rules[i].left > static_cast<Symbol>(i));
                if (d.rules[i].right != kSymbolA) CHECK(d.rules[i].right > static_cast<Symbol>(i));
            }
            CHECK(build_minimal_dag(unfold(d)) == d);
        }
    }
}

TEST_CASE("dag_to_normal_tslp on f(a,a)") {
    NormalFormTslp g = dag_to_normal_tslp(build_minimal_dag(parse_term("f(a,a)")));
    CHECK(g.size() == 3);
    CHECK(g.nonterminal_count() == 2);
    CHECK(serialize_term(eval(g)) == "f(a,a)");
    CHECK(g.rule(1).type == RuleType::PairRight);  // right-leaning shell f(x,a)
    CHECK(validate_normal_form(g).ok());
}

TEST_CASE("dag_to_normal_tslp agrees with unfold, n <= 9") {
    for (std::uint32_t n = 1; n <= 9; ++n) {
        for (const Term& t : enumerate_trees(n)) {
            Dag d = build_minimal_dag(t);
            NormalFormTslp g = dag_to_normal_tslp(d);
            CHECK(eval(g) == t);
            CHECK(validate_normal_form(g).ok());
            CHECK(g.size() <= 4 * dag_size(d));
        }
    }
}
