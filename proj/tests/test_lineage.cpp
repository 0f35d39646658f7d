#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qexplain/qexplain.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace qexplain;

namespace {

Database six_tuple_db() {
    Schema schema{{PredicateDef{"R", {"x", "y"}}, PredicateDef{"S", {"x"}}}};
    return validate_database(schema, {
                                         {"R", {"a", "b"}, "t1"},
                                         {"R", {"c", "d"}, "t2"},
                                         {"R", {"b", "b"}, "t3"},
                                         {"S", {"a"}, "t4"},
                                         {"S", {"c"}, "t5"},
                                         {"S", {"b"}, "t6"},
                                     });
}

LineageFormula random_dnf(std::mt19937_64& rng) {
    const std::size_t nvars = 1 + rng() % 6;
    const std::size_t nconj = 1 + rng() % 4;
    std::vector<TidSet> conjuncts;
    for (std::size_t c = 0; c < nconj; ++c) {
        TidSet conj;
        for (std::size_t v = 0; v < nvars; ++v)
            if (rng() % 2) conj.push_back("t" + std::to_string(v + 1));
        if (conj.empty()) conj.push_back("t1");
        conjuncts.push_back(std::move(conj));
    }
    return make_dnf(std::move(conjuncts));
}

} // namespace

TEST_CASE("lineage lists the minimal witnesses as conjuncts") {
    const Database db = six_tuple_db();
    const UnionQuery q = parse_query("q :- S(X), R(X, Y), S(Y).");
    const LineageFormula f = build_lineage(q, db);
    CHECK(f.to_string() == "(t1 & t4 & t6) | (t3 & t6)");
    CHECK(f.variables() == TidSet{"t1", "t3", "t4", "t6"});
    CHECK(minimal_witnesses(f) == oracle::minimal_witness_sets(q, db));
}

TEST_CASE("normalization absorbs dominated conjuncts and dedupes") {
    const LineageFormula f = make_dnf({{"t2", "t1"}, {"t1"}, {"t1", "t2", "t3"}, {"t1"}});
    CHECK(f.to_string() == "(t1)");
    const LineageFormula g = make_dnf({{"t2", "t1"}, {"t3"}});
    CHECK(g.to_string() == "(t1 & t2) | (t3)");
    CHECK(make_dnf({}).is_false());
    CHECK(make_dnf({{}}).is_true());
    CHECK(minimal_witnesses(make_dnf({{}})) == std::vector<TidSet>{{}});
}

TEST_CASE("lineage of a false query is false") {
    const Database db = six_tuple_db();
    const LineageFormula f = build_lineage(parse_query("q :- R(d, d)."), db);
    CHECK(f.is_false());
    CHECK(f.to_string() == "false");
    CHECK_THROWS_AS(build_lineage(parse_query("p(X) :- R(X, Y)."), db), Error);
}

TEST_CASE("interventions propagate constants") {
    const LineageFormula f = make_dnf({{"t1", "t4", "t6"}, {"t3", "t6"}});
    CHECK(intervene(f, "t6", false).is_false());
    CHECK(intervene(f, "t6", true).to_string() == "(t1 & t4) | (t3)");
    CHECK(intervene(intervene(f, "t3", true), "t6", true).is_true());
    // irrelevant variable changes nothing
    CHECK(intervene(f, "t99", true).to_string() == f.to_string());
}

TEST_CASE("formula evaluation needs every variable bound") {
    const LineageFormula f = make_dnf({{"t1", "t2"}, {"t3"}});
    CHECK(eval_formula(f, {{"t1", true}, {"t2", true}, {"t3", false}}));
    CHECK_FALSE(eval_formula(f, {{"t1", true}, {"t2", false}, {"t3", false}}));
    CHECK_THROWS_AS(eval_formula(f, {{"t1", true}}), Error);
}

TEST_CASE("probability under the uniform half assignment") {
    const Database db = six_tuple_db();
    const UnionQuery q = parse_query("q :- S(X), R(X, Y), S(Y).");
    const LineageFormula f = build_lineage(q, db);
    const ProbabilityAssignment p = ProbabilityAssignment::uniform(db);
    // 16 worlds over 4 variables: t6 & (t3 | t1 t4) -> (1/2) * (1/2 + 1/2*1/4) = 5/16
    CHECK(probability(f, p) == Rational(5, 16));
    CHECK(probability(LineageFormula::make_true(), p) == 1);
    CHECK(probability(LineageFormula::make_false(), p) == 0);
}

TEST_CASE("probability agrees with world enumeration on random formulas") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 60; ++round) {
        const LineageFormula f = random_dnf(rng);
        ProbabilityAssignment p;
        for (const std::string& v : f.variables()) {
            if (round % 2 == 0)
                p.set(v, Rational(1, 2)); // exercises the popcount fast path
            else
                p.set(v, Rational(1 + rng() % 3, 4)); // 1/4, 1/2 or 3/4
        }
        INFO("round " << round << " formula " << f.to_string());
        CHECK(probability(f, p) == oracle::dnf_probability(f, p));
    }
}

TEST_CASE("probability is independent of the thread count") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 10; ++round) {
        const LineageFormula f = random_dnf(rng);
        ProbabilityAssignment p;
        for (const std::string& v : f.variables()) p.set(v, Rational(2, 5));
        CHECK(probability(f, p, kDefaultMaxVars, 1) == probability(f, p, kDefaultMaxVars, 4));
    }
}

TEST_CASE("probability guards its input") {
    const LineageFormula f = make_dnf({{"t1"}});
    ProbabilityAssignment p;
    CHECK_THROWS_AS(probability(f, p), Error); // t1 unbound
    p.set("t1", Rational(3, 2));
    CHECK_THROWS_AS(probability(f, p), Error); // not a probability

    std::vector<TidSet> big(1);
    for (int i = 0; i < 31; ++i) big[0].push_back("t" + std::to_string(i + 1));
    const LineageFormula wide = make_dnf(std::move(big));
    ProbabilityAssignment pw;
    for (const std::string& v : wide.variables()) pw.set(v, Rational(1, 2));
    try {
        probability(wide, pw);
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooManyVariables);
    }
    CHECK(probability(wide, pw, 31) == Rational(1, BigInt(1) << 31));
}
