#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qexplain/constraints.hpp"
#include "qexplain/error.hpp"
#include "qexplain/lineage.hpp"
#include "qexplain/model.hpp"
#include "qexplain/query.hpp"
#include "qexplain/rational.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

/// Tuples whose removal makes the subject a counterfactual cause.
struct ContingencySet {
    std::string subject;
    TidSet tids;
};

struct CauseReport {
    std::string tid;
    bool is_actual = false;
    bool is_counterfactual = false;
    std::vector<TidSet> minimal_contingencies;
    Rational responsibility = Rational(0);
};

enum class ContingencyMode { Minimal, Minimum };

namespace detail {

enum class GammaStatus {
    QueryFalse,    // removing Γ already falsifies q; supersets are hopeless
    NotAdmissible, // q survives Γ but the pair fails an admissibility condition
    Admissible,
};

/// Ordered-by-size scan over subsets of a pool, keeping the inclusion-minimal
/// admissible ones. Supersets of an admissible set are never minimal, and
/// supersets of a query-falsifying set can never satisfy condition (a), so
/// both prune the scan. Admissibility itself is not monotone (constraints
/// may recover), which is why the scan is exhaustive per size.
template <typename StatusFn>
inline std::vector<std::uint64_t> minimal_admissible_masks(std::size_t pool_size,
                                                           StatusFn&& status,
                                                           bool stop_at_first_size) {
    std::vector<std::uint64_t> found;
    std::vector<std::uint64_t> dead;
    auto subsumed = [](const std::vector<std::uint64_t>& sets, std::uint64_t mask) {
        for (std::uint64_t s : sets)
            if ((s & mask) == s) return true;
        return false;
    };
    for (std::size_t k = 0; k <= pool_size; ++k) {
        if (stop_at_first_size && !found.empty()) break;
        // Gosper's hack walks all masks of popcount k in increasing order
        std::uint64_t mask = k == 0 ? 0 : (std::uint64_t{1} << k) - 1;
        const std::uint64_t limit = std::uint64_t{1} << pool_size;
        while (mask < limit) {
            if (!subsumed(found, mask) && !subsumed(dead, mask)) {
                switch (status(mask)) {
                    case GammaStatus::QueryFalse: dead.push_back(mask); break;
                    case GammaStatus::Admissible: found.push_back(mask); break;
                    case GammaStatus::NotAdmissible: break;
                }
            }
            if (k == 0) break;
            const std::uint64_t c = mask & -mask;
            const std::uint64_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    return found;
}

inline TidSet mask_to_tids(std::uint64_t mask, const std::vector<std::string>& pool) {
    TidSet out;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (mask >> i & 1) out.push_back(pool[i]);
    return out;
}

/// Shared setup for all causality entry points.
struct CausalContext {
    const Database& db;
    const UnionQuery& q;
    const ConstraintSet* ics; // null: plain mode
    std::vector<TidSet> witnesses_min;
    TidSet relevant; // union of minimal witnesses

    CausalContext(const Database& db_, const UnionQuery& q_, const ConstraintSet* ics_)
        : db(db_), q(q_), ics(ics_) {
        if (!holds(q, db)) raise(ErrorKind::QueryNotTrue, "query is not true in the database");
        if (ics && !satisfies(db, *ics))
            raise(ErrorKind::InconsistentInput, "database violates the integrity constraints");
        witnesses_min = minimal_witnesses(build_lineage(q, db));
        for (const TidSet& w : witnesses_min)
            relevant.insert(relevant.end(), w.begin(), w.end());
        normalize_tids(relevant);
    }

    bool is_relevant(const std::string& tid) const { return tid_set_contains(relevant, tid); }

    /// Contingency members: lineage tuples in plain mode; in IC mode any
    /// tuple may be needed to restore consistency.
    std::vector<std::string> pool_for(const std::string& subject) const {
        std::vector<std::string> pool;
        if (ics) {
            for (const std::string& tid : db.tids())
                if (tid != subject) pool.push_back(tid);
        } else {
            for (const std::string& tid : relevant)
                if (tid != subject) pool.push_back(tid);
        }
        return pool;
    }

    std::vector<TidSet> minimal_gammas(const std::string& subject, bool stop_at_first_size,
                                       std::size_t max_pool) const {
        const std::vector<std::string> pool = pool_for(subject);
        if (pool.size() > max_pool)
            raise(ErrorKind::TooManyVariables,
                  "contingency search over " + std::to_string(pool.size()) +
                      " tuples exceeds the cap of " + std::to_string(max_pool));

        std::vector<std::uint64_t> masks;
        if (!ics) {
            // witnesses as bitmasks over the pool; the subject never sits in Γ
            std::vector<std::uint64_t> wmask;
            std::vector<bool> whas_subject;
            for (const TidSet& w : witnesses_min) {
                std::uint64_t m = 0;
                for (std::size_t i = 0; i < pool.size(); ++i)
                    if (tid_set_contains(w, pool[i])) m |= std::uint64_t{1} << i;
                wmask.push_back(m);
                whas_subject.push_back(tid_set_contains(w, subject));
            }
            auto status = [&](std::uint64_t gamma) {
                bool q_true = false;
                for (std::uint64_t m : wmask)
                    if ((m & gamma) == 0) { q_true = true; break; }
                if (!q_true) return GammaStatus::QueryFalse;
                for (std::size_t i = 0; i < wmask.size(); ++i)
                    if ((wmask[i] & gamma) == 0 && !whas_subject[i])
                        return GammaStatus::NotAdmissible; // witness survives both removals
                return GammaStatus::Admissible;
            };
            masks = minimal_admissible_masks(pool.size(), status, stop_at_first_size);
        } else {
            auto status = [&](std::uint64_t gamma) {
                TidSet removed = mask_to_tids(gamma, pool);
                const Database after_gamma = db.without(removed);
                if (!holds(q, after_gamma)) return GammaStatus::QueryFalse;
                if (!satisfies(after_gamma, *ics)) return GammaStatus::NotAdmissible;
                removed.push_back(subject);
                normalize_tids(removed);
                const Database after_both = db.without(removed);
                if (holds(q, after_both) || !satisfies(after_both, *ics))
                    return GammaStatus::NotAdmissible;
                return GammaStatus::Admissible;
            };
            masks = minimal_admissible_masks(pool.size(), status, stop_at_first_size);
        }

        std::vector<TidSet> out;
        out.reserve(masks.size());
        for (std::uint64_t m : masks) out.push_back(mask_to_tids(m, pool));
        std::sort(out.begin(), out.end(), tid_set_canonical_less);
        return out;
    }
};

inline CauseReport report_from_gammas(const std::string& tid, std::vector<TidSet> gammas) {
    CauseReport r;
    r.tid = tid;
    r.minimal_contingencies = std::move(gammas);
    if (!r.minimal_contingencies.empty()) {
        r.is_actual = true;
        const std::size_t k = r.minimal_contingencies.front().size(); // canonical order: smallest first
        r.is_counterfactual = k == 0;
        r.responsibility = Rational(1, static_cast<unsigned>(1 + k));
    }
    return r;
}

} // namespace detail

inline constexpr std::size_t kDefaultMaxContingencyPool = 30;

/// True iff removing the tuple alone falsifies the query.
inline bool is_counterfactual_cause(const Database& db, const UnionQuery& q,
                                    const std::string& tid) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    if (!holds(q, db)) raise(ErrorKind::QueryNotTrue, "query is not true in the database");
    return !holds(q, db.without({tid}));
}

/// One report per tuple occurring in some minimal witness; every other tuple
/// has responsibility 0 and is omitted. With constraints, both removal steps
/// must also preserve consistency, so contingencies may reach outside the
/// query's own witnesses.
inline std::vector<CauseReport> find_causes(const Database& db, const UnionQuery& q,
                                            const ConstraintSet* ics = nullptr,
                                            std::size_t max_pool = kDefaultMaxContingencyPool) {
    detail::CausalContext ctx(db, q, ics);
    std::vector<CauseReport> reports;
    for (const std::string& tid : ctx.relevant)
        reports.push_back(detail::report_from_gammas(
            tid, ctx.minimal_gammas(tid, /*stop_at_first_size=*/false, max_pool)));
    return reports;
}

/// 1/(1+|Γ_min|) over admissible contingency sets; 0 for non-causes.
inline Rational responsibility(const Database& db, const UnionQuery& q, const std::string& tid,
                               const ConstraintSet* ics = nullptr,
                               std::size_t max_pool = kDefaultMaxContingencyPool) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    detail::CausalContext ctx(db, q, ics);
    if (!ctx.is_relevant(tid)) return Rational(0);
    const std::vector<TidSet> gammas =
        ctx.minimal_gammas(tid, /*stop_at_first_size=*/true, max_pool);
    if (gammas.empty()) return Rational(0);
    return Rational(1, static_cast<unsigned>(1 + gammas.front().size()));
}

/// mode=Minimal: all inclusion-minimal admissible Γ; mode=Minimum: only the
/// cardinality-minimum ones (all ties reported).
inline std::vector<ContingencySet> contingency_sets(const Database& db, const UnionQuery& q,
                                                    const std::string& tid,
                                                    const ConstraintSet* ics = nullptr,
                                                    ContingencyMode mode = ContingencyMode::Minimal,
                                                    std::size_t max_pool = kDefaultMaxContingencyPool) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    detail::CausalContext ctx(db, q, ics);
    std::vector<ContingencySet> out;
    if (!ctx.is_relevant(tid)) return out;
    const std::vector<TidSet> gammas = ctx.minimal_gammas(
        tid, /*stop_at_first_size=*/mode == ContingencyMode::Minimum, max_pool);
    for (const TidSet& g : gammas) out.push_back(ContingencySet{tid, g});
    return out;
}

} // namespace qexplain
