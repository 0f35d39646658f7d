#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "qexplain/error.hpp"
#include "qexplain/model.hpp"
#include "qexplain/query.hpp"
#include "qexplain/rational.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

inline constexpr std::size_t kDefaultMaxVars = 30;

/// Positive DNF over tuple variables, kept normalized: conjuncts are
/// sorted tid sets, absorption applied eagerly, conjunct list sorted.
/// No conjuncts means constant false unless const_true is set; a formula
/// with conjuncts never has const_true set.
struct LineageFormula {
    bool const_true = false;
    std::vector<TidSet> conjuncts;

    bool is_false() const { return !const_true && conjuncts.empty(); }
    bool is_true() const { return const_true; }

    static LineageFormula make_true() { return LineageFormula{true, {}}; }
    static LineageFormula make_false() { return LineageFormula{false, {}}; }
    static LineageFormula variable(const std::string& tid) {
        return LineageFormula{false, {TidSet{tid}}};
    }

    /// Union of all conjuncts, natural-sorted.
    TidSet variables() const {
        TidSet out;
        for (const TidSet& c : conjuncts) out.insert(out.end(), c.begin(), c.end());
        normalize_tids(out);
        return out;
    }

    /// `(t1) | (t2 & t3)`; constants print as `true` / `false`.
    std::string to_string() const {
        if (const_true) return "true";
        if (conjuncts.empty()) return "false";
        std::string out;
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            if (i) out += " | ";
            out += "(" + join(conjuncts[i], " & ") + ")";
        }
        return out;
    }
};

namespace detail {

/// Sort conjuncts, drop duplicates and absorbed (superset) conjuncts.
/// An empty conjunct makes the whole formula true.
inline LineageFormula normalize_dnf(std::vector<TidSet> conjuncts) {
    for (TidSet& c : conjuncts) normalize_tids(c);
    for (const TidSet& c : conjuncts)
        if (c.empty()) return LineageFormula::make_true();
    std::sort(conjuncts.begin(), conjuncts.end(), tid_set_canonical_less);
    conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());
    std::vector<TidSet> kept;
    for (const TidSet& c : conjuncts) {
        bool absorbed = false;
        for (const TidSet& k : kept)
            if (tid_subset(k, c)) { absorbed = true; break; }
        if (!absorbed) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(), tid_set_less);
    return LineageFormula{false, std::move(kept)};
}

} // namespace detail

inline LineageFormula make_dnf(std::vector<TidSet> conjuncts) {
    return detail::normalize_dnf(std::move(conjuncts));
}

/// DNF over tuple variables with one conjunct per valuation witness;
/// constant false when the query has no valuation.
inline LineageFormula build_lineage(const UnionQuery& q, const Database& db) {
    if (!q.is_boolean()) raise(ErrorKind::NonBooleanQuery, "lineage needs a Boolean query");
    std::vector<TidSet> conjuncts;
    for (const Valuation& v : witnesses(q, db, {})) conjuncts.push_back(v.witness);
    return detail::normalize_dnf(std::move(conjuncts));
}

/// Standard propositional evaluation; every variable of f must be assigned.
inline bool eval_formula(const LineageFormula& f, const std::map<std::string, bool>& truth) {
    if (f.const_true) return true;
    for (const TidSet& c : f.conjuncts)
        for (const std::string& tid : c)
            if (!truth.count(tid)) raise(ErrorKind::UnboundVariable, tid);
    for (const TidSet& c : f.conjuncts) {
        bool all = true;
        for (const std::string& tid : c)
            if (!truth.at(tid)) { all = false; break; }
        if (all) return true;
    }
    return false;
}

/// do(X_tid = value): constant propagation; the result never mentions tid.
inline LineageFormula intervene(const LineageFormula& f, const std::string& tid, bool value) {
    if (f.const_true) return f;
    std::vector<TidSet> conjuncts;
    for (const TidSet& c : f.conjuncts) {
        if (tid_set_contains(c, tid)) {
            if (!value) continue; // conjunct is falsified
            TidSet reduced;
            for (const std::string& t : c)
                if (t != tid) reduced.push_back(t);
            conjuncts.push_back(std::move(reduced));
        } else {
            conjuncts.push_back(c);
        }
    }
    return detail::normalize_dnf(std::move(conjuncts));
}

/// Prime implicants of the positive DNF. Normalization keeps the conjuncts
/// absorbed, so these are exactly the stored conjuncts.
inline std::vector<TidSet> minimal_witnesses(const LineageFormula& f) {
    if (f.const_true) return {TidSet{}};
    return f.conjuncts;
}

/// Tuple-independent probabilities, default 1/2 per database tuple.
/// Potential tuples outside the database carry probability 0 unless set.
struct ProbabilityAssignment {
    std::map<std::string, Rational> prob;

    static ProbabilityAssignment uniform(const Database& db, Rational p = Rational(1, 2)) {
        ProbabilityAssignment a;
        for (const std::string& tid : db.tids()) a.prob.emplace(tid, p);
        return a;
    }

    ProbabilityAssignment& set(const std::string& tid, Rational p) {
        prob[tid] = std::move(p);
        return *this;
    }

    Rational at(const std::string& tid) const {
        auto it = prob.find(tid);
        if (it == prob.end()) raise(ErrorKind::UnboundVariable, tid);
        return it->second;
    }
};

namespace detail {

struct MaskedDnf {
    std::vector<std::string> vars;
    std::vector<std::uint64_t> conjunct_masks;

    bool satisfied(std::uint64_t world) const {
        for (std::uint64_t m : conjunct_masks)
            if ((world & m) == m) return true;
        return false;
    }
};

inline MaskedDnf mask_dnf(const LineageFormula& f) {
    MaskedDnf md;
    md.vars = f.variables();
    for (const TidSet& c : f.conjuncts) {
        std::uint64_t m = 0;
        for (const std::string& tid : c) {
            const auto it = std::lower_bound(md.vars.begin(), md.vars.end(), tid, natural_less);
            m |= std::uint64_t{1} << static_cast<std::uint64_t>(it - md.vars.begin());
        }
        md.conjunct_masks.push_back(m);
    }
    return md;
}

} // namespace detail

/// Exact probability of f under independent tuple events, by world
/// enumeration over the formula's variables. Splitting the world range
/// over threads cannot change the result: the per-world terms are exact
/// rationals summed blockwise in a fixed order.
inline Rational probability(const LineageFormula& f, const ProbabilityAssignment& p,
                            std::size_t max_vars = kDefaultMaxVars, unsigned threads = 1) {
    if (f.const_true) return Rational(1);
    if (f.conjuncts.empty()) return Rational(0);

    const detail::MaskedDnf md = detail::mask_dnf(f);
    const std::size_t n = md.vars.size();
    if (n > max_vars)
        raise(ErrorKind::TooManyVariables,
              std::to_string(n) + " lineage variables exceed the enumeration cap of " +
                  std::to_string(max_vars));

    const Rational half(1, 2);
    std::vector<Rational> pv;
    bool all_half = true;
    for (const std::string& tid : md.vars) {
        Rational r = p.at(tid);
        if (r < 0 || r > 1) raise(ErrorKind::InvalidParams, "probability outside [0,1] for " + tid);
        if (r != half) all_half = false;
        pv.push_back(std::move(r));
    }

    const std::uint64_t worlds = std::uint64_t{1} << n;
    const unsigned nthreads =
        std::max<unsigned>(1, std::min<unsigned>(threads, worlds >= 4096 ? 8 : 1));

    auto scan = [&](std::uint64_t lo, std::uint64_t hi, Rational& mass, std::uint64_t& count) {
        for (std::uint64_t w = lo; w < hi; ++w) {
            if (!md.satisfied(w)) continue;
            if (all_half) {
                ++count;
            } else {
                Rational term(1);
                for (std::size_t i = 0; i < n; ++i)
                    term *= (w >> i) & 1 ? pv[i] : Rational(1) - pv[i];
                mass += term;
            }
        }
    };

    std::vector<Rational> mass(nthreads, Rational(0));
    std::vector<std::uint64_t> count(nthreads, 0);
    if (nthreads == 1) {
        scan(0, worlds, mass[0], count[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = worlds / nthreads;
        for (unsigned i = 0; i < nthreads; ++i) {
            const std::uint64_t lo = chunk * i;
            const std::uint64_t hi = i + 1 == nthreads ? worlds : lo + chunk;
            pool.emplace_back(scan, lo, hi, std::ref(mass[i]), std::ref(count[i]));
        }
        for (std::thread& t : pool) t.join();
    }

    if (all_half) {
        std::uint64_t sat = 0;
        for (std::uint64_t c : count) sat += c;
        return Rational(BigInt(sat), BigInt(1) << n);
    }
    Rational total(0);
    for (const Rational& m : mass) total += m;
    return total;
}

} // namespace qexplain
