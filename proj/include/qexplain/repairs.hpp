#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qexplain/causality.hpp"
#include "qexplain/constraints.hpp"
#include "qexplain/error.hpp"
#include "qexplain/model.hpp"
#include "qexplain/query.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

inline constexpr std::size_t kDefaultMaxRepairs = 100000;

/// Vertices are the database's tids; one hyperedge per DC-violating
/// valuation, kept as an antichain (subsumed supersets dropped).
struct ConflictHypergraph {
    std::vector<std::string> vertices;
    std::vector<TidSet> edges;
};

inline ConflictHypergraph conflict_hypergraph(const Database& db,
                                              const std::vector<DenialConstraint>& dcs) {
    ConflictHypergraph g;
    g.vertices = db.tids();
    std::vector<TidSet> edges;
    for (const DenialConstraint& dc : dcs) {
        std::vector<TidSet> v = detail::dc_violation_sets(db, dc);
        edges.insert(edges.end(), std::make_move_iterator(v.begin()),
                     std::make_move_iterator(v.end()));
    }
    std::sort(edges.begin(), edges.end(), tid_set_canonical_less);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const TidSet& e : edges) {
        bool subsumed = false;
        for (const TidSet& kept : g.edges)
            if (tid_subset(kept, e)) { subsumed = true; break; }
        if (!subsumed) g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end(), tid_set_less);
    return g;
}

namespace detail {

/// Depth-first branching on the first uncovered edge. Every minimal hitting
/// set is reached (when the partial set is inside one, the next uncovered
/// edge must be hit through one of its vertices); non-minimal byproducts are
/// filtered afterwards.
struct HittingSetSearch {
    const std::vector<TidSet>& edges;
    std::size_t cap;
    std::set<TidSet> candidates;
    TidSet current;

    void dfs() {
        const TidSet* uncovered = nullptr;
        for (const TidSet& e : edges) {
            bool hit = false;
            for (const std::string& t : current)
                if (tid_set_contains(e, t)) { hit = true; break; }
            if (!hit) { uncovered = &e; break; }
        }
        if (!uncovered) {
            TidSet sorted = current;
            normalize_tids(sorted);
            candidates.insert(std::move(sorted));
            if (candidates.size() > cap)
                raise(ErrorKind::ExplosionGuard,
                      "more than " + std::to_string(cap) + " repairs; raise the cap to continue");
            return;
        }
        for (const std::string& v : *uncovered) {
            current.push_back(v);
            dfs();
            current.pop_back();
        }
    }
};

/// All inclusion-minimal hitting sets of an antichain of nonempty edges.
inline std::vector<TidSet> minimal_hitting_sets(const std::vector<TidSet>& edges,
                                                std::size_t cap = kDefaultMaxRepairs) {
    HittingSetSearch search{edges, cap, {}, {}};
    search.dfs();
    std::vector<TidSet> sets(search.candidates.begin(), search.candidates.end());
    std::sort(sets.begin(), sets.end(), tid_set_canonical_less);
    std::vector<TidSet> minimal;
    for (const TidSet& s : sets) {
        bool has_subset = false;
        for (const TidSet& m : minimal)
            if (tid_subset(m, s)) { has_subset = true; break; }
        if (!has_subset) minimal.push_back(s);
    }
    return minimal;
}

} // namespace detail

enum class RepairKind { S, C };

/// Repairs identified by what they remove; `removed` is canonically ordered
/// (size, then tid) so C-repairs sit at the front of an S-repair listing.
struct RepairSet {
    RepairKind kind = RepairKind::S;
    std::vector<TidSet> removed;

    std::size_t count() const { return removed.size(); }
};

inline Database repair_database(const Database& db, const TidSet& removed) {
    return db.without(removed);
}

/// Subset-maximal consistent subinstances: complements of the minimal
/// hitting sets of the conflict hypergraph.
inline RepairSet s_repairs(const Database& db, const std::vector<DenialConstraint>& dcs,
                           std::size_t max_repairs = kDefaultMaxRepairs) {
    const ConflictHypergraph g = conflict_hypergraph(db, dcs);
    RepairSet rs;
    rs.kind = RepairKind::S;
    rs.removed = detail::minimal_hitting_sets(g.edges, max_repairs);
    return rs;
}

/// Maximum-cardinality consistent subinstances: the S-repairs that remove
/// the fewest tuples.
inline RepairSet c_repairs(const Database& db, const std::vector<DenialConstraint>& dcs,
                           std::size_t max_repairs = kDefaultMaxRepairs) {
    RepairSet rs = s_repairs(db, dcs, max_repairs);
    rs.kind = RepairKind::C;
    if (!rs.removed.empty()) {
        const std::size_t best = rs.removed.front().size(); // canonical order: smallest first
        std::erase_if(rs.removed, [&](const TidSet& r) { return r.size() != best; });
    }
    return rs;
}

/// Causes read off the repairs of κ(Q): Γ is a minimal contingency for τ
/// exactly when Γ∪{τ} is a minimal hitting set containing τ. Output format
/// identical to find_causes without constraints.
inline std::vector<CauseReport> causes_via_repairs(const Database& db, const UnionQuery& q,
                                                   std::size_t max_repairs = kDefaultMaxRepairs) {
    if (!holds(q, db)) raise(ErrorKind::QueryNotTrue, "query is not true in the database");
    const ConflictHypergraph g = conflict_hypergraph(db, query_to_dcs(q));
    const std::vector<TidSet> hs = detail::minimal_hitting_sets(g.edges, max_repairs);

    TidSet relevant;
    for (const TidSet& e : g.edges) relevant.insert(relevant.end(), e.begin(), e.end());
    normalize_tids(relevant);

    std::vector<CauseReport> reports;
    for (const std::string& tid : relevant) {
        std::vector<TidSet> gammas;
        for (const TidSet& h : hs) {
            if (!tid_set_contains(h, tid)) continue;
            TidSet gamma;
            for (const std::string& t : h)
                if (t != tid) gamma.push_back(t);
            gammas.push_back(std::move(gamma));
        }
        std::sort(gammas.begin(), gammas.end(), tid_set_canonical_less);
        reports.push_back(detail::report_from_gammas(tid, std::move(gammas)));
    }
    return reports;
}

/// Answers holding in every repair of the chosen class.
inline AnswerSet consistent_answers(const Database& db, const std::vector<DenialConstraint>& dcs,
                                    const UnionQuery& q, RepairKind kind = RepairKind::S,
                                    std::size_t max_repairs = kDefaultMaxRepairs) {
    const RepairSet rs =
        kind == RepairKind::S ? s_repairs(db, dcs, max_repairs) : c_repairs(db, dcs, max_repairs);
    AnswerSet out;
    bool first = true;
    for (const TidSet& removed : rs.removed) {
        AnswerSet a = evaluate(q, db.without(removed));
        if (first) {
            out = std::move(a);
            first = false;
        } else {
            AnswerSet inter;
            std::set_intersection(out.begin(), out.end(), a.begin(), a.end(),
                                  std::inserter(inter, inter.begin()));
            out = std::move(inter);
        }
        if (out.empty()) break;
    }
    return out;
}

} // namespace qexplain
