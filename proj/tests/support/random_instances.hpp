#pragma once

// Seeded generator for small random databases with queries that are
// guaranteed true: query atoms are sampled from actual tuples, then
// constants are generalized to variables (one variable per constant, so
// joins stay satisfiable). Everything goes through the real parsers.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qexplain/qexplain.hpp"

namespace testgen {

using namespace qexplain;

struct Instance {
    Database db;
    UnionQuery q;
};

inline const std::vector<std::string>& domain() {
    static const std::vector<std::string> d{"a", "b", "c", "d"};
    return d;
}

inline Schema small_schema() {
    return Schema{{PredicateDef{"R", {"x", "y"}},
                   PredicateDef{"S", {"x"}},
                   PredicateDef{"T", {"x", "y"}}}};
}

inline Database random_db(std::mt19937_64& rng) {
    auto pick = [&](std::size_t n) { return rng() % n; };
    std::vector<Row> rows;

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& x : domain())
        for (const auto& y : domain()) pairs.emplace_back(x, y);

    auto sample_pairs = [&](const std::string& pred, std::size_t count) {
        std::vector<std::pair<std::string, std::string>> pool = pairs;
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t i = 0; i < count; ++i)
            rows.push_back(Row{pred, {pool[i].first, pool[i].second}, ""});
    };

    sample_pairs("R", 1 + pick(4)); // 1..4
    std::vector<std::string> singles = domain();
    std::shuffle(singles.begin(), singles.end(), rng);
    const std::size_t ns = pick(4); // 0..3
    for (std::size_t i = 0; i < ns; ++i) rows.push_back(Row{"S", {singles[i]}, ""});
    sample_pairs("T", pick(3)); // 0..2

    return validate_database(small_schema(), rows);
}

/// One disjunct whose atoms come from sampled tuples; equal constants that get
/// generalized share a variable, so the original tuples remain a witness.
inline std::string witness_disjunct(const Database& db, std::mt19937_64& rng) {
    auto pick = [&](std::size_t n) { return rng() % n; };
    const std::size_t natoms = 1 + pick(3);
    std::map<std::string, std::string> var_of; // constant -> variable
    std::string body;
    for (std::size_t i = 0; i < natoms; ++i) {
        const Tuple& t = db.tuples()[pick(db.size())];
        std::string atom = t.predicate + "(";
        for (std::size_t pos = 0; pos < t.values.size(); ++pos) {
            const std::string& c = t.values[pos];
            std::string term = c;
            if (pick(2) == 0) {
                auto it = var_of.find(c);
                if (it == var_of.end()) {
                    std::string v = "V";
                    v += static_cast<char>('A' + (c[0] - 'a'));
                    it = var_of.emplace(c, v).first;
                }
                term = it->second;
            }
            if (pos) atom += ", ";
            atom += term;
        }
        atom += ")";
        if (i) body += ", ";
        body += atom;
    }
    return body;
}

inline Instance random_true_instance(std::uint64_t seed, bool allow_union = false) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    Database db = random_db(rng);
    std::string text = "q :- " + witness_disjunct(db, rng) + ".\n";
    if (allow_union && rng() % 10 < 3) text += "q :- " + witness_disjunct(db, rng) + ".\n";
    UnionQuery q = parse_query(text);
    return Instance{std::move(db), std::move(q)};
}

/// Query with unconstrained random terms; may be false on the database.
inline Instance random_loose_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 2);
    Database db = random_db(rng);
    auto pick = [&](std::size_t n) { return rng() % n; };
    static const std::vector<std::string> preds{"R", "S", "T"};
    static const std::vector<std::size_t> arities{2, 1, 2};
    static const std::vector<std::string> vars{"X", "Y", "Z"};
    const std::size_t natoms = 1 + pick(3);
    std::string body;
    for (std::size_t i = 0; i < natoms; ++i) {
        const std::size_t p = pick(3);
        std::string atom = preds[p] + "(";
        for (std::size_t pos = 0; pos < arities[p]; ++pos) {
            if (pos) atom += ", ";
            atom += pick(2) == 0 ? vars[pick(3)] : domain()[pick(4)];
        }
        atom += ")";
        if (i) body += ", ";
        body += atom;
    }
    UnionQuery q = parse_query("q :- " + body + ".\n");
    return Instance{std::move(db), std::move(q)};
}

inline std::vector<DenialConstraint> random_dcs(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 3);
    auto pick = [&](std::size_t n) { return rng() % n; };
    static const std::vector<std::string> preds{"R", "S", "T"};
    static const std::vector<std::size_t> arities{2, 1, 2};
    static const std::vector<std::string> vars{"X", "Y"};
    const std::size_t ndcs = 1 + pick(2);
    std::string text;
    for (std::size_t d = 0; d < ndcs; ++d) {
        const std::size_t natoms = 1 + pick(2);
        text += ":- ";
        for (std::size_t i = 0; i < natoms; ++i) {
            const std::size_t p = pick(3);
            if (i) text += ", ";
            text += preds[p] + "(";
            for (std::size_t pos = 0; pos < arities[p]; ++pos) {
                if (pos) text += ", ";
                text += pick(2) == 0 ? vars[pick(2)] : domain()[pick(4)];
            }
            text += ")";
        }
        text += ".\n";
    }
    return parse_constraints(text).dcs;
}

} // namespace testgen
