#include <catch2/catch_amalgamated.hpp>

#include "qexplain/qexplain.hpp"

using namespace qexplain;

TEST_CASE("boolean query parses to an empty head") {
    const UnionQuery q = parse_query("q :- R(X, Y), S(Y).");
    CHECK(q.name == "q");
    CHECK(q.is_boolean());
    REQUIRE(q.disjuncts.size() == 1);
    const ConjunctiveQuery& d = q.disjuncts.front();
    REQUIRE(d.body.size() == 2);
    CHECK(d.body[0].predicate == "R");
    CHECK(d.body[0].terms[0].is_variable());
    CHECK(d.body[1].to_string() == "S(Y)");
    CHECK(d.existential_variables() == std::vector<std::string>{"X", "Y"});
}

TEST_CASE("open query distinguishes head variables") {
    const UnionQuery q = parse_query("ans(X) :- R(X, Y).");
    CHECK_FALSE(q.is_boolean());
    CHECK(q.head_arity() == 1);
    const ConjunctiveQuery& d = q.disjuncts.front();
    CHECK(d.head == std::vector<std::string>{"X"});
    // Y stays existential, X is distinguished.
    CHECK(d.existential_variables() == std::vector<std::string>{"Y"});
    // heads take variables only
    CHECK_THROWS_AS(parse_query("ans(X, b) :- R(X, Y)."), Error);
}

TEST_CASE("rules with the same head merge into a union") {
    const UnionQuery q = parse_query("q :- R(a, b).\n"
                                     "q :- R(a, X), R(X, b).\n");
    CHECK(q.disjuncts.size() == 2);
    CHECK(parse_query("q :- R(X, Y).").disjuncts.size() == 1);
}

TEST_CASE("quoted constants, comments and numbers survive the lexer") {
    const UnionQuery q = parse_query("% leading comment\n"
                                     "q :- Emp(\"John Smith\", 12.5), Emp(\"a\\\"b\", 7). % trailing\n");
    const ConjunctiveQuery& d = q.disjuncts.front();
    CHECK(d.body[0].terms[0] == Term::constant("John Smith"));
    CHECK(d.body[0].terms[1] == Term::constant("12.5"));
    CHECK(d.body[1].terms[0] == Term::constant("a\"b"));
    CHECK(d.body[1].terms[1] == Term::constant("7"));
}

TEST_CASE("parser reports positions on syntax errors") {
    try {
        parse_query("q :- R(X,\n   ,Y).");
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_query("q :- ."), Error);
    CHECK_THROWS_AS(parse_query("q :- R(X, Y)"), Error); // missing period
    CHECK_THROWS_AS(parse_query(""), Error);
}

TEST_CASE("head variables must occur in the body") {
    try {
        parse_query("ans(Z) :- R(X, Y).");
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HeadVariableNotInBody);
    }
}

TEST_CASE("predicate arities must be consistent") {
    try {
        parse_query("q :- R(X, Y), R(X).");
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ArityMismatch);
    }
    // also across rules of one union
    CHECK_THROWS_AS(parse_query("q :- R(a).\nq :- R(a, b).\n"), Error);
    // and across head arities
    CHECK_THROWS_AS(parse_program("q(X) :- R(X).\nq(X, Y) :- T(X, Y).\n"), Error);
}

TEST_CASE("parse_query wants exactly one query and no constraints") {
    CHECK_THROWS_AS(parse_query("q :- R(X).\np :- S(X).\n"), Error);
    CHECK_THROWS_AS(parse_query(":- R(X, X)."), Error);
    // parse_program takes both, parse_constraints only constraints
    const Program prog = parse_program("q :- R(X, Y).\n:- S(X), R(X, X).\n");
    CHECK(prog.queries.size() == 1);
    CHECK(prog.constraints.dcs.size() == 1);
    CHECK_THROWS_AS(parse_constraints("q :- R(X)."), Error);
}

TEST_CASE("denial constraints parse and print back") {
    const ConstraintSet cs = parse_constraints(":- P(X), Q(X, Y).\n:- P(X), R(X, Y).\n");
    REQUIRE(cs.dcs.size() == 2);
    CHECK(cs.dcs[0].to_string() == ":- P(X), Q(X, Y).");
    CHECK(cs.dcs[1].atoms[1].predicate == "R");
}

TEST_CASE("inclusion dependencies parse with anonymous positions") {
    const ConstraintSet cs = parse_constraints("Dep(X, Y) -> Course(_, Y, X).");
    REQUIRE(cs.inds.size() == 1);
    const InclusionDependency& ind = cs.inds.front();
    CHECK(ind.lhs.predicate == "Dep");
    CHECK(ind.export_map == std::vector<int>{-1, 1, 0});
    CHECK(ind.to_string() == "Dep(X, Y) -> Course(_, Y, X).");

    // rhs variables must be exported from the lhs
    CHECK_THROWS_AS(parse_constraints("Dep(X, Y) -> Course(Z, Y, X)."), Error);
    // anonymous terms make no sense in rule bodies
    CHECK_THROWS_AS(parse_query("q :- R(_, X)."), Error);
}
