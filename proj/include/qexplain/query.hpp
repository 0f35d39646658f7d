#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qexplain/atom.hpp"
#include "qexplain/constraints.hpp"
#include "qexplain/detail/match.hpp"
#include "qexplain/error.hpp"
#include "qexplain/model.hpp"

namespace qexplain {

/// One conjunctive rule. Boolean iff the head is empty; every body variable
/// not in the head is existential.
struct ConjunctiveQuery {
    std::vector<std::string> head;
    std::vector<Atom> body;

    bool is_boolean() const { return head.empty(); }

    std::vector<std::string> existential_variables() const {
        std::vector<std::string> out;
        for (const std::string& v : atom_variables(body))
            if (std::find(head.begin(), head.end(), v) == head.end()) out.push_back(v);
        return out;
    }
};

/// Disjunction of conjunctive rules sharing one head arity.
struct UnionQuery {
    std::string name;
    std::vector<ConjunctiveQuery> disjuncts;

    std::size_t head_arity() const {
        return disjuncts.empty() ? 0 : disjuncts.front().head.size();
    }
    bool is_boolean() const { return head_arity() == 0; }
};

inline UnionQuery as_union(ConjunctiveQuery cq, std::string name = "q") {
    return UnionQuery{std::move(name), {std::move(cq)}};
}

/// One way a query answer is produced: the variable binding and the image
/// tuples it touches.
struct Valuation {
    std::size_t disjunct = 0;
    detail::Binding binding;
    TidSet witness;
};

using Answer = std::vector<std::string>;
using AnswerSet = std::set<Answer>;

namespace detail {

inline void check_union(const UnionQuery& q) {
    if (q.disjuncts.empty()) raise(ErrorKind::InvalidInput, "query without disjuncts");
    for (const auto& d : q.disjuncts) {
        if (d.body.empty()) raise(ErrorKind::InvalidInput, "rule with empty body");
        if (d.head.size() != q.head_arity())
            raise(ErrorKind::InvalidInput, "disjuncts disagree on head arity");
    }
}

} // namespace detail

/// Standard CQ/UCQ semantics; duplicates eliminated. {()} encodes a true
/// Boolean query, the empty set a false one.
inline AnswerSet evaluate(const UnionQuery& q, const Database& db,
                          const detail::ActiveMask& mask = {}) {
    detail::check_union(q);
    AnswerSet answers;
    for (const ConjunctiveQuery& d : q.disjuncts) {
        detail::Matcher m(db, d.body, mask);
        m.run({}, [&](const detail::Binding& b, const std::vector<std::size_t>&) {
            Answer a;
            a.reserve(d.head.size());
            for (const std::string& v : d.head) a.push_back(b.at(v));
            answers.insert(std::move(a));
            return true;
        });
    }
    return answers;
}

/// Boolean satisfaction with early exit.
inline bool holds(const UnionQuery& q, const Database& db,
                  const detail::ActiveMask& mask = {}) {
    detail::check_union(q);
    for (const ConjunctiveQuery& d : q.disjuncts) {
        bool found = false;
        detail::Matcher m(db, d.body, mask);
        m.run({}, [&](const detail::Binding&, const std::vector<std::size_t>&) {
            found = true;
            return false;
        });
        if (found) return true;
    }
    return false;
}

/// All valuations (across disjuncts) producing the given answer, each with
/// its witness tid set.
inline std::vector<Valuation> witnesses(const UnionQuery& q, const Database& db,
                                        const Answer& answer,
                                        const detail::ActiveMask& mask = {}) {
    detail::check_union(q);
    if (answer.size() != q.head_arity())
        raise(ErrorKind::ArityMismatch, "answer arity does not match query head");
    std::vector<Valuation> out;
    for (std::size_t di = 0; di < q.disjuncts.size(); ++di) {
        const ConjunctiveQuery& d = q.disjuncts[di];
        detail::Binding initial;
        bool consistent = true;
        for (std::size_t i = 0; i < d.head.size(); ++i) {
            auto it = initial.find(d.head[i]);
            if (it != initial.end() && it->second != answer[i]) { consistent = false; break; }
            initial[d.head[i]] = answer[i];
        }
        if (!consistent) continue;
        detail::Matcher m(db, d.body, mask);
        m.run(initial, [&](const detail::Binding& b, const std::vector<std::size_t>& used) {
            Valuation v;
            v.disjunct = di;
            v.binding = b;
            for (std::size_t idx : used) v.witness.push_back(db.tuples()[idx].tid);
            normalize_tids(v.witness);
            out.push_back(std::move(v));
            return true;
        });
    }
    return out;
}

/// Syntactic facts driving the Shapley dichotomy check.
struct QueryClassification {
    bool hierarchical = false;
    bool self_join_free = false;
    std::map<std::string, std::set<std::size_t>> atoms_of; // existential var -> body atom indices
};

/// Hierarchical iff the atom sets of every two existential variables are
/// nested or disjoint. Defined on Boolean CQs; purely syntactic.
inline QueryClassification classify(const ConjunctiveQuery& q) {
    if (!q.is_boolean()) raise(ErrorKind::NonBooleanQuery, "classification is defined on BCQs");
    QueryClassification c;
    for (const std::string& v : q.existential_variables()) {
        std::set<std::size_t>& atoms = c.atoms_of[v];
        for (std::size_t i = 0; i < q.body.size(); ++i)
            for (const Term& t : q.body[i].terms)
                if (t.is_variable() && t.text == v) atoms.insert(i);
    }
    c.hierarchical = true;
    for (auto i = c.atoms_of.begin(); i != c.atoms_of.end() && c.hierarchical; ++i) {
        for (auto j = std::next(i); j != c.atoms_of.end(); ++j) {
            const auto& a = i->second;
            const auto& b = j->second;
            const bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
            const bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
            std::vector<std::size_t> inter;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(inter));
            if (!(a_in_b || b_in_a || inter.empty())) { c.hierarchical = false; break; }
        }
    }
    c.self_join_free = true;
    for (std::size_t i = 0; i < q.body.size() && c.self_join_free; ++i)
        for (std::size_t j = i + 1; j < q.body.size(); ++j)
            if (q.body[i].predicate == q.body[j].predicate) { c.self_join_free = false; break; }
    return c;
}

/// The negation of a BCQ as a denial constraint (identical atom list).
inline DenialConstraint query_to_dc(const ConjunctiveQuery& q) {
    if (!q.is_boolean()) raise(ErrorKind::NonBooleanQuery, "only BCQs turn into DCs");
    return DenialConstraint{q.body};
}

/// One DC per disjunct; a UBCQ corresponds to a set of denial constraints.
inline std::vector<DenialConstraint> query_to_dcs(const UnionQuery& q) {
    if (!q.is_boolean()) raise(ErrorKind::NonBooleanQuery, "only UBCQs turn into DC sets");
    std::vector<DenialConstraint> out;
    out.reserve(q.disjuncts.size());
    for (const auto& d : q.disjuncts) out.push_back(query_to_dc(d));
    return out;
}

/// Open query + chosen answer = Boolean query: head variables are replaced
/// by the answer's constants throughout each body.
inline UnionQuery instantiate(const UnionQuery& q, const Answer& answer) {
    detail::check_union(q);
    if (answer.size() != q.head_arity())
        raise(ErrorKind::ArityMismatch, "answer arity does not match query head");
    UnionQuery out;
    out.name = q.name;
    for (const ConjunctiveQuery& d : q.disjuncts) {
        ConjunctiveQuery inst;
        inst.body = d.body;
        for (Atom& a : inst.body)
            for (Term& t : a.terms)
                if (t.is_variable())
                    for (std::size_t i = 0; i < d.head.size(); ++i)
                        if (d.head[i] == t.text) { t = Term::constant(answer[i]); break; }
        out.disjuncts.push_back(std::move(inst));
    }
    return out;
}

} // namespace qexplain
