#pragma once

#include <string>
#include <vector>

#include "qexplain/atom.hpp"
#include "qexplain/detail/match.hpp"
#include "qexplain/error.hpp"
#include "qexplain/model.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

/// A prohibited conjunction: no valuation may make all atoms facts at once.
struct DenialConstraint {
    std::vector<Atom> atoms;

    std::string to_string() const {
        std::vector<std::string> parts;
        for (const Atom& a : atoms) parts.push_back(a.to_string());
        return ":- " + join(parts, ", ") + ".";
    }
};

/// lhs(x...) -> rhs(..) where rhs terms are lhs variables (exported),
/// constants, or existential placeholders.
struct InclusionDependency {
    Atom lhs;
    Atom rhs;
    /// Per rhs position: index of the lhs term it exports, or -1 when the
    /// position is existential or a constant.
    std::vector<int> export_map;

    std::string to_string() const {
        return lhs.to_string() + " -> " + rhs.to_string() + ".";
    }
};

struct ConstraintSet {
    std::vector<DenialConstraint> dcs;
    std::vector<InclusionDependency> inds;

    bool empty() const { return dcs.empty() && inds.empty(); }
};

/// Builds the rhs-position export map and checks well-formedness.
inline InclusionDependency make_ind(Atom lhs, Atom rhs) {
    InclusionDependency ind{std::move(lhs), std::move(rhs), {}};
    ind.export_map.assign(ind.rhs.terms.size(), -1);
    for (std::size_t pos = 0; pos < ind.rhs.terms.size(); ++pos) {
        const Term& t = ind.rhs.terms[pos];
        if (!t.is_variable() || t.text == "_") continue;
        bool found = false;
        for (std::size_t l = 0; l < ind.lhs.terms.size(); ++l) {
            if (ind.lhs.terms[l].is_variable() && ind.lhs.terms[l].text == t.text) {
                ind.export_map[pos] = static_cast<int>(l);
                found = true;
                break;
            }
        }
        if (!found)
            raise(ErrorKind::InvalidInput,
                  "inclusion dependency exports unknown variable " + t.text);
    }
    return ind;
}

namespace detail {

/// All DC-violating valuations as tid sets, deduplicated, natural order.
inline std::vector<TidSet> dc_violation_sets(const Database& db, const DenialConstraint& dc,
                                             const ActiveMask& mask = {}) {
    if (dc.atoms.empty()) raise(ErrorKind::InvalidInput, "denial constraint with no atoms");
    std::vector<TidSet> sets;
    Matcher m(db, dc.atoms, mask);
    m.run({}, [&](const Binding&, const std::vector<std::size_t>& used) {
        TidSet tids;
        for (std::size_t idx : used) tids.push_back(db.tuples()[idx].tid);
        normalize_tids(tids);
        sets.push_back(std::move(tids));
        return true;
    });
    std::sort(sets.begin(), sets.end(), tid_set_canonical_less);
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return sets;
}

/// First lhs fact of the IND without a matching rhs fact, if any.
inline bool ind_unmatched_facts(const Database& db, const InclusionDependency& ind,
                                const ActiveMask& mask, std::vector<std::size_t>& out,
                                bool first_only) {
    db.schema().at(ind.lhs.predicate); // UnknownPredicate check
    const PredicateDef& rhs_def = db.schema().at(ind.rhs.predicate);
    if (rhs_def.arity() != ind.rhs.arity() ||
        db.schema().at(ind.lhs.predicate).arity() != ind.lhs.arity())
        raise(ErrorKind::ArityMismatch, "inclusion dependency does not fit the schema");

    for (std::size_t li : db.tuples_of(ind.lhs.predicate)) {
        if (!active(mask, li)) continue;
        const Tuple& lfact = db.tuples()[li];
        // lhs atom may carry constants or repeated variables; skip
        // non-matching facts.
        bool applies = true;
        std::map<std::string, std::string> bound;
        for (std::size_t pos = 0; pos < ind.lhs.terms.size(); ++pos) {
            const Term& t = ind.lhs.terms[pos];
            if (t.is_constant()) {
                if (t.text != lfact.values[pos]) { applies = false; break; }
            } else {
                auto it = bound.find(t.text);
                if (it == bound.end()) bound[t.text] = lfact.values[pos];
                else if (it->second != lfact.values[pos]) { applies = false; break; }
            }
        }
        if (!applies) continue;

        bool matched = false;
        for (std::size_t ri : db.tuples_of(ind.rhs.predicate)) {
            if (!active(mask, ri)) continue;
            const Tuple& rfact = db.tuples()[ri];
            bool ok = true;
            for (std::size_t pos = 0; pos < ind.rhs.terms.size(); ++pos) {
                const Term& t = ind.rhs.terms[pos];
                if (t.is_constant()) {
                    if (t.text != rfact.values[pos]) { ok = false; break; }
                } else if (ind.export_map[pos] >= 0) {
                    if (lfact.values[static_cast<std::size_t>(ind.export_map[pos])] !=
                        rfact.values[pos]) { ok = false; break; }
                }
                // existential placeholder: anything matches
            }
            if (ok) { matched = true; break; }
        }
        if (!matched) {
            out.push_back(li);
            if (first_only) return true;
        }
    }
    return !out.empty();
}

} // namespace detail

/// True iff no valuation makes all atoms of dc facts of db at once.
inline bool satisfies_dc(const Database& db, const DenialConstraint& dc) {
    if (dc.atoms.empty()) raise(ErrorKind::InvalidInput, "denial constraint with no atoms");
    bool violated = false;
    detail::Matcher m(db, dc.atoms, {});
    m.run({}, [&](const detail::Binding&, const std::vector<std::size_t>&) {
        violated = true;
        return false;
    });
    return !violated;
}

/// True iff every lhs fact has an rhs fact agreeing on exported positions.
inline bool satisfies_ind(const Database& db, const InclusionDependency& ind) {
    std::vector<std::size_t> unmatched;
    return !detail::ind_unmatched_facts(db, ind, {}, unmatched, /*first_only=*/true);
}

inline bool satisfies(const Database& db, const ConstraintSet& cs) {
    for (const auto& dc : cs.dcs)
        if (!satisfies_dc(db, dc)) return false;
    for (const auto& ind : cs.inds)
        if (!satisfies_ind(db, ind)) return false;
    return true;
}

struct Violation {
    enum class Kind { DC, IND };
    Kind kind;
    std::size_t constraint_index; // within its list
    TidSet tids;                  // DC: the matched valuation; IND: the unmatched lhs fact
};

/// One entry per DC-violating valuation and per unmatched IND lhs fact.
/// Empty result iff db satisfies cs.
inline std::vector<Violation> violations(const Database& db, const ConstraintSet& cs) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < cs.dcs.size(); ++i)
        for (TidSet& s : detail::dc_violation_sets(db, cs.dcs[i]))
            out.push_back(Violation{Violation::Kind::DC, i, std::move(s)});
    for (std::size_t i = 0; i < cs.inds.size(); ++i) {
        std::vector<std::size_t> unmatched;
        detail::ind_unmatched_facts(db, cs.inds[i], {}, unmatched, /*first_only=*/false);
        for (std::size_t idx : unmatched)
            out.push_back(Violation{Violation::Kind::IND, i, TidSet{db.tuples()[idx].tid}});
    }
    return out;
}

} // namespace qexplain
