#include <catch2/catch_amalgamated.hpp>

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

Database university_db() {
    Schema schema{{PredicateDef{"Dep", {"dname", "tstaff"}},
                   PredicateDef{"Course", {"cname", "tstaff", "dname"}}}};
    return validate_database(schema, {
                                         {"Dep", {"Computing", "John"}, "t1"},
                                         {"Dep", {"Philosophy", "Patrick"}, "t2"},
                                         {"Dep", {"Math", "Kevin"}, "t3"},
                                         {"Course", {"COM08", "John", "Computing"}, "t4"},
                                         {"Course", {"Math01", "Kevin", "Math"}, "t5"},
                                         {"Course", {"HIST02", "Patrick", "Philosophy"}, "t6"},
                                         {"Course", {"Math08", "Eli", "Math"}, "t7"},
                                         {"Course", {"COM01", "John", "Computing"}, "t8"},
                                     });
}

const CauseReport* report_for(const std::vector<CauseReport>& rs, const std::string& tid) {
    for (const CauseReport& r : rs)
        if (r.tid == tid) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("responsibilities on the six tuple instance") {
    const Database db = six_tuple_db();
    const UnionQuery q = parse_query("q :- S(X), R(X, Y), S(Y).");
    const std::vector<CauseReport> rs = find_causes(db, q);

    REQUIRE(rs.size() == 4); // t2 and t5 touch no witness
    CHECK(report_for(rs, "t2") == nullptr);
    CHECK(report_for(rs, "t5") == nullptr);

    const CauseReport& t6 = *report_for(rs, "t6");
    CHECK(t6.is_counterfactual);
    CHECK(t6.responsibility == 1);
    CHECK(t6.minimal_contingencies == std::vector<TidSet>{{}});

    for (const char* tid : {"t1", "t3", "t4"}) {
        const CauseReport* r = report_for(rs, tid);
        REQUIRE(r != nullptr);
        CHECK(r->is_actual);
        CHECK_FALSE(r->is_counterfactual);
        CHECK(r->responsibility == Rational(1, 2));
    }
    CHECK(report_for(rs, "t3")->minimal_contingencies ==
          std::vector<TidSet>{{"t1"}, {"t4"}});

    CHECK(is_counterfactual_cause(db, q, "t6"));
    CHECK_FALSE(is_counterfactual_cause(db, q, "t1"));
    CHECK_FALSE(is_counterfactual_cause(db, q, "t2"));
    CHECK(responsibility(db, q, "t6") == 1);
    CHECK(responsibility(db, q, "t2") == 0);
}

TEST_CASE("causes match the definition on random instances") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const testgen::Instance inst = testgen::random_true_instance(seed, true);
        const std::vector<CauseReport> rs = find_causes(inst.db, inst.q);
        INFO("seed " << seed);
        for (const std::string& tid : inst.db.tids()) {
            const oracle::OracleCause want = oracle::cause_of(inst.db, inst.q, tid);
            const CauseReport* got = report_for(rs, tid);
            if (got == nullptr) {
                CHECK_FALSE(want.is_actual);
                continue;
            }
            CHECK(got->is_actual == want.is_actual);
            CHECK(got->is_counterfactual == want.is_counterfactual);
            CHECK(got->responsibility == want.responsibility);
            CHECK(got->minimal_contingencies == want.minimal_contingencies);
        }
    }
}

TEST_CASE("causes under denial constraints match the definition") {
    int compared = 0;
    for (std::uint64_t seed = 0; compared < 25 && seed < 400; ++seed) {
        const testgen::Instance inst = testgen::random_true_instance(seed);
        ConstraintSet cs;
        cs.dcs = testgen::random_dcs(seed);
        if (!oracle::naive_satisfies(inst.db, cs)) continue;
        ++compared;
        const std::vector<CauseReport> rs = find_causes(inst.db, inst.q, &cs);
        INFO("seed " << seed);
        for (const CauseReport& got : rs) {
            const oracle::OracleCause want = oracle::cause_of(inst.db, inst.q, got.tid, &cs);
            CHECK(got.is_actual == want.is_actual);
            CHECK(got.responsibility == want.responsibility);
            CHECK(got.minimal_contingencies == want.minimal_contingencies);
        }
    }
    REQUIRE(compared == 25);
}

TEST_CASE("inclusion dependencies enlarge contingency sets") {
    const Database db = university_db();
    const ConstraintSet cs = parse_constraints("Dep(X, Y) -> Course(_, Y, X).");
    const UnionQuery q2_john = parse_query("q :- Course(Z, \"John\", Y).");

    CHECK(responsibility(db, q2_john, "t4") == Rational(1, 2));
    CHECK(responsibility(db, q2_john, "t4", &cs) == Rational(1, 3));

    const std::vector<CauseReport> plain = find_causes(db, q2_john);
    const std::vector<CauseReport> with_ind = find_causes(db, q2_john, &cs);
    CHECK(report_for(plain, "t4")->minimal_contingencies == std::vector<TidSet>{{"t8"}});
    CHECK(report_for(with_ind, "t4")->minimal_contingencies ==
          std::vector<TidSet>{{"t1", "t8"}});
    CHECK(report_for(with_ind, "t8")->minimal_contingencies ==
          std::vector<TidSet>{{"t1", "t4"}});

    // oracle agreement on the IND-constrained instance
    for (const char* tid : {"t4", "t8"}) {
        const oracle::OracleCause want = oracle::cause_of(db, q2_john, tid, &cs);
        const CauseReport& got = *report_for(with_ind, tid);
        CHECK(got.responsibility == want.responsibility);
        CHECK(got.minimal_contingencies == want.minimal_contingencies);
    }

    const UnionQuery q_john = parse_query("q :- Dep(Y, \"John\"), Course(Z, \"John\", Y).");
    CHECK(is_counterfactual_cause(db, q_john, "t1"));
    const std::vector<CauseReport> strict = find_causes(db, q_john, &cs);
    CHECK(report_for(strict, "t1")->is_counterfactual);
    CHECK(report_for(strict, "t1")->responsibility == 1);
    // t4/t8 stop being causes: removing either with any contingency set breaks the IND
    CHECK_FALSE(report_for(strict, "t4")->is_actual);
    CHECK(report_for(strict, "t4")->responsibility == 0);
}

TEST_CASE("minimum mode keeps only the smallest contingency sets") {
    const Database db = six_tuple_db();
    const UnionQuery q = parse_query("q :- S(X), R(X, Y), S(Y).");
    const std::vector<ContingencySet> min_sets =
        contingency_sets(db, q, "t3", nullptr, ContingencyMode::Minimum);
    const std::vector<ContingencySet> all_sets =
        contingency_sets(db, q, "t3", nullptr, ContingencyMode::Minimal);
    CHECK(min_sets.size() == all_sets.size()); // both singletons here
    for (const ContingencySet& c : min_sets) CHECK(c.tids.size() == 1);

    // a case where they differ: contingency sets of sizes one and two
    Schema schema{{PredicateDef{"R", {"x", "y"}}, PredicateDef{"S", {"x"}}}};
    const Database db2 = validate_database(schema, {
                                                       {"R", {"a", "a"}, "t1"},
                                                       {"S", {"a"}, "t2"},
                                                       {"S", {"b"}, "t3"},
                                                       {"R", {"b", "c"}, "t4"},
                                                       {"R", {"b", "d"}, "t5"},
                                                   });
    const UnionQuery q2 = parse_query("q :- S(X), R(X, Y).");
    // witnesses: {t1,t2}, {t3,t4}, {t3,t5}; for t1 the minimal Gammas are
    // {t3} and {t4,t5}, only the first is minimum
    const std::vector<ContingencySet> all2 = contingency_sets(db2, q2, "t1");
    REQUIRE(all2.size() == 2);
    CHECK(all2[0].tids == TidSet{"t3"});
    CHECK(all2[1].tids == TidSet{"t4", "t5"});
    const std::vector<ContingencySet> min2 =
        contingency_sets(db2, q2, "t1", nullptr, ContingencyMode::Minimum);
    REQUIRE(min2.size() == 1);
    CHECK(min2[0].tids == TidSet{"t3"});
    CHECK(responsibility(db2, q2, "t1") == Rational(1, 2));
}

TEST_CASE("causality guards its preconditions") {
    const Database db = six_tuple_db();
    const UnionQuery q = parse_query("q :- S(X), R(X, Y), S(Y).");
    const UnionQuery false_q = parse_query("q :- R(d, a).");

    CHECK_THROWS_AS(find_causes(db, false_q), Error);
    CHECK_THROWS_AS(responsibility(db, q, "t99"), Error);
    CHECK_THROWS_AS(is_counterfactual_cause(db, false_q, "t1"), Error);

    // database must satisfy the constraints before interventions make sense
    ConstraintSet broken;
    broken.dcs = parse_constraints(":- S(X).").dcs;
    try {
        find_causes(db, q, &broken);
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InconsistentInput);
    }

    // contingency pools beyond the cap refuse instead of exploding
    Schema wide{{PredicateDef{"R", {"x", "y"}}}};
    std::vector<Row> rows;
    for (int i = 0; i < 32; ++i)
        rows.push_back({"R", {"a", "v" + std::to_string(i)}, ""});
    const Database big = validate_database(wide, rows);
    try {
        find_causes(big, parse_query("q :- R(a, X)."));
        FAIL("unreachable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooManyVariables);
    }
}
