#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qexplain/causality.hpp"
#include "qexplain/io.hpp"
#include "qexplain/lineage.hpp"
#include "qexplain/query.hpp"
#include "qexplain/rational.hpp"
#include "qexplain/repairs.hpp"
#include "qexplain/scores.hpp"

namespace qexplain {

/// {"num":..,"den":..,"decimal":".."}: num/den as JSON numbers while they fit
/// in 53 bits, strings beyond that; the decimal is display-only (6
/// significant digits).
inline json rational_json(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    const BigInt limit = BigInt(1) << 53;
    json out;
    if (num <= limit && num >= -limit)
        out["num"] = static_cast<std::int64_t>(num);
    else
        out["num"] = num.str();
    if (den <= limit)
        out["den"] = static_cast<std::int64_t>(den);
    else
        out["den"] = den.str();
    out["decimal"] = decimal_string(r);
    return out;
}

inline json answers_json(const AnswerSet& answers) {
    json arr = json::array();
    for (const Answer& a : answers) arr.push_back(a);
    return arr;
}

inline json tid_sets_json(const std::vector<TidSet>& sets) {
    json arr = json::array();
    for (const TidSet& s : sets) arr.push_back(s);
    return arr;
}

inline json cause_report_json(const CauseReport& r) {
    json out;
    out["tid"] = r.tid;
    out["actual"] = r.is_actual;
    out["counterfactual"] = r.is_counterfactual;
    out["responsibility"] = rational_json(r.responsibility);
    out["minimal_contingencies"] = tid_sets_json(r.minimal_contingencies);
    return out;
}

inline json cause_reports_json(const std::vector<CauseReport>& reports) {
    json arr = json::array();
    for (const CauseReport& r : reports) arr.push_back(cause_report_json(r));
    return arr;
}

inline json repairs_json(const RepairSet& rs) {
    json out;
    out["kind"] = rs.kind == RepairKind::S ? "s" : "c";
    out["count"] = rs.count();
    json arr = json::array();
    for (const TidSet& removed : rs.removed) {
        json r;
        r["removed"] = removed;
        arr.push_back(std::move(r));
    }
    out["repairs"] = std::move(arr);
    return out;
}

inline json classification_json(const QueryClassification& c) {
    json out;
    out["hierarchical"] = c.hierarchical;
    out["self_join_free"] = c.self_join_free;
    json atoms;
    for (const auto& [var, idxs] : c.atoms_of)
        atoms[var] = std::vector<std::size_t>(idxs.begin(), idxs.end());
    out["atoms_of"] = std::move(atoms);
    return out;
}

struct ScoreReport {
    std::string tid;
    std::string score; // "ce" | "shapley" | "banzhaf"
    Rational value = Rational(0);
    std::string method = "exact";
    std::uint64_t samples = 0;
    bool converged = true;
};

inline json score_report_json(const ScoreReport& r) {
    json out;
    out["tid"] = r.tid;
    out["score"] = r.score;
    out["value"] = rational_json(r.value);
    out["method"] = r.method;
    if (r.method != "exact") {
        out["samples"] = r.samples;
        out["converged"] = r.converged;
    }
    return out;
}

inline json score_reports_json(const std::vector<ScoreReport>& reports) {
    json arr = json::array();
    for (const ScoreReport& r : reports) arr.push_back(score_report_json(r));
    return arr;
}

} // namespace qexplain
