#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qexplain/error.hpp"
#include "qexplain/lineage.hpp"
#include "qexplain/model.hpp"
#include "qexplain/query.hpp"
#include "qexplain/rational.hpp"
#include "qexplain/util.hpp"

namespace qexplain {

inline constexpr std::size_t kDefaultMaxExact = 25;
inline constexpr std::size_t kMonteCarloVarLimit = 64;

enum class GameKind { Boolean, Sum, Min, Max, Avg };

inline const char* to_string(GameKind k) {
    switch (k) {
        case GameKind::Boolean: return "boolean";
        case GameKind::Sum: return "sum";
        case GameKind::Min: return "min";
        case GameKind::Max: return "max";
        case GameKind::Avg: return "avg";
    }
    return "?";
}

/// Map from subinstances to numbers: query truth as 0/1, or an aggregate of
/// one head position over the distinct answers. Min/max/avg are exposed but
/// exact-only.
struct GameFunction {
    GameKind kind = GameKind::Boolean;
    UnionQuery query;
    std::size_t position = 0; // aggregated head position
};

inline GameFunction make_game(UnionQuery q, GameKind kind, std::size_t position = 0) {
    detail::check_union(q);
    if (kind == GameKind::Boolean) {
        if (!q.is_boolean())
            raise(ErrorKind::NonBooleanQuery, "boolean game needs a Boolean query");
        return GameFunction{kind, std::move(q), 0};
    }
    if (q.is_boolean())
        raise(ErrorKind::InvalidParams, "aggregate game needs an open query");
    if (position >= q.head_arity())
        raise(ErrorKind::InvalidParams, "aggregate position exceeds the head arity");
    return GameFunction{kind, std::move(q), position};
}

namespace detail {

/// "12", "-3", "2.5" as exact rationals.
inline std::optional<Rational> parse_rational_constant(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '-' || s[i] == '+') { neg = s[i] == '-'; ++i; }
    std::string digits, frac;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits.push_back(s[i++]);
    if (digits.empty()) return std::nullopt;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac.push_back(s[i++]);
        if (frac.empty()) return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;
    BigInt num(digits + frac);
    BigInt den(1);
    for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
    Rational r(num, den);
    return neg ? -r : r;
}

/// A game compiled against a fixed database: the tuples that can influence
/// the value (each answer's minimal witnesses), as bitmasks. The game value
/// of any S ⊆ D depends only on S ∩ vars, so tuples outside vars are null
/// players and scores are computed on the reduced player set.
struct PreparedGame {
    GameKind kind = GameKind::Boolean;
    std::vector<std::string> vars; // natural tid order
    struct AnswerTerm {
        Rational value;
        std::vector<std::uint64_t> masks; // minimal witnesses of this answer
    };
    std::vector<AnswerTerm> answers;

    std::size_t index_of(const std::string& tid) const {
        const auto it = std::lower_bound(vars.begin(), vars.end(), tid, natural_less);
        return it != vars.end() && *it == tid ? static_cast<std::size_t>(it - vars.begin())
                                              : vars.size();
    }

    static bool present(const AnswerTerm& a, std::uint64_t s) {
        for (std::uint64_t m : a.masks)
            if ((s & m) == m) return true;
        return false;
    }

    Rational eval(std::uint64_t s) const {
        switch (kind) {
            case GameKind::Boolean:
                return !answers.empty() && present(answers.front(), s) ? Rational(1) : Rational(0);
            case GameKind::Sum: {
                Rational total(0);
                for (const AnswerTerm& a : answers)
                    if (present(a, s)) total += a.value;
                return total;
            }
            case GameKind::Min:
            case GameKind::Max:
            case GameKind::Avg: {
                Rational acc(0);
                std::size_t n = 0;
                for (const AnswerTerm& a : answers) {
                    if (!present(a, s)) continue;
                    if (n == 0) {
                        acc = a.value;
                    } else if (kind == GameKind::Min) {
                        acc = std::min(acc, a.value);
                    } else if (kind == GameKind::Max) {
                        acc = std::max(acc, a.value);
                    } else {
                        acc += a.value;
                    }
                    ++n;
                }
                if (n == 0) return Rational(0);
                if (kind == GameKind::Avg) return acc / static_cast<int>(n);
                return acc;
            }
        }
        return Rational(0);
    }
};

inline PreparedGame prepare_game(const Database& db, const GameFunction& g,
                                 std::size_t var_limit) {
    PreparedGame pg;
    pg.kind = g.kind;

    std::vector<std::pair<Rational, std::vector<TidSet>>> answer_witnesses;
    if (g.kind == GameKind::Boolean) {
        const LineageFormula f = build_lineage(g.query, db);
        if (!f.is_false()) answer_witnesses.emplace_back(Rational(1), f.conjuncts);
    } else {
        for (const Answer& a : evaluate(g.query, db)) {
            const auto value = parse_rational_constant(a[g.position]);
            if (!value)
                raise(ErrorKind::NonNumericPosition,
                      "answer value '" + a[g.position] + "' is not numeric");
            std::vector<TidSet> sets;
            for (const Valuation& v : witnesses(g.query, db, a)) sets.push_back(v.witness);
            answer_witnesses.emplace_back(*value, normalize_dnf(std::move(sets)).conjuncts);
        }
    }

    TidSet all;
    for (const auto& [value, sets] : answer_witnesses)
        for (const TidSet& w : sets) all.insert(all.end(), w.begin(), w.end());
    normalize_tids(all);
    if (all.size() > var_limit)
        raise(ErrorKind::TooManyVariables,
              std::to_string(all.size()) + " relevant tuples exceed the cap of " +
                  std::to_string(var_limit));
    pg.vars = std::move(all);

    for (auto& [value, sets] : answer_witnesses) {
        PreparedGame::AnswerTerm term;
        term.value = std::move(value);
        for (const TidSet& w : sets) {
            std::uint64_t m = 0;
            for (const std::string& tid : w)
                m |= std::uint64_t{1} << pg.index_of(tid);
            term.masks.push_back(m);
        }
        pg.answers.push_back(std::move(term));
    }
    return pg;
}

/// Per-cardinality marginal sums over all subsets of the reduced player set
/// minus the subject. Boolean games use integer counters; the mask range
/// splits over threads with exact blockwise merge, so worker count cannot
/// change results.
struct MarginalSums {
    std::vector<Rational> by_size;     // aggregate games
    std::vector<std::int64_t> counts;  // boolean games: #subsets with marginal 1
    bool boolean = false;
};

inline MarginalSums marginal_sums(const PreparedGame& pg, std::size_t subject_index,
                                  unsigned threads) {
    const std::size_t m = pg.vars.size();
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < m; ++i)
        if (i != subject_index) others.push_back(i);
    const std::size_t mm = others.size();
    const std::uint64_t subject_bit = std::uint64_t{1} << subject_index;
    const std::uint64_t total = std::uint64_t{1} << mm;

    MarginalSums sums;
    sums.boolean = pg.kind == GameKind::Boolean;
    const unsigned nthreads =
        std::max<unsigned>(1, std::min<unsigned>(threads, total >= 65536 ? 8 : 1));

    auto scan = [&](std::uint64_t lo, std::uint64_t hi, MarginalSums& local) {
        local.by_size.assign(sums.boolean ? 0 : mm + 1, Rational(0));
        local.counts.assign(sums.boolean ? mm + 1 : 0, 0);
        for (std::uint64_t sel = lo; sel < hi; ++sel) {
            std::uint64_t s = 0;
            for (std::size_t i = 0; i < mm; ++i)
                if (sel >> i & 1) s |= std::uint64_t{1} << others[i];
            const int k = std::popcount(sel);
            if (sums.boolean) {
                const bool with = PreparedGame::present(pg.answers.front(), s | subject_bit);
                const bool without = with && PreparedGame::present(pg.answers.front(), s);
                if (with && !without) ++local.counts[static_cast<std::size_t>(k)];
            } else {
                Rational delta = pg.eval(s | subject_bit) - pg.eval(s);
                if (delta != 0) local.by_size[static_cast<std::size_t>(k)] += delta;
            }
        }
    };

    std::vector<MarginalSums> parts(nthreads);
    if (nthreads == 1) {
        scan(0, total, parts[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = total / nthreads;
        for (unsigned i = 0; i < nthreads; ++i) {
            const std::uint64_t lo = chunk * i;
            const std::uint64_t hi = i + 1 == nthreads ? total : lo + chunk;
            pool.emplace_back(scan, lo, hi, std::ref(parts[i]));
        }
        for (std::thread& t : pool) t.join();
    }

    sums.by_size.assign(sums.boolean ? 0 : mm + 1, Rational(0));
    sums.counts.assign(sums.boolean ? mm + 1 : 0, 0);
    for (const MarginalSums& part : parts) {
        for (std::size_t k = 0; k < part.by_size.size(); ++k) sums.by_size[k] += part.by_size[k];
        for (std::size_t k = 0; k < part.counts.size(); ++k) sums.counts[k] += part.counts[k];
    }
    return sums;
}

} // namespace detail

/// E(Q | do(X_τ=1)) − E(Q | do(X_τ=0)) under independent tuple
/// probabilities, default 1/2.
inline Rational causal_effect(const Database& db, const UnionQuery& q, const std::string& tid,
                              const ProbabilityAssignment* p = nullptr,
                              std::size_t max_vars = kDefaultMaxVars, unsigned threads = 1) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    const LineageFormula f = build_lineage(q, db);
    const ProbabilityAssignment prob = p ? *p : ProbabilityAssignment::uniform(db);
    const Rational on = probability(intervene(f, tid, true), prob, max_vars, threads);
    const Rational off = probability(intervene(f, tid, false), prob, max_vars, threads);
    return on - off;
}

/// Exact Shapley value by the subset form of the permutation average:
/// Σ_S |S|!(m−|S|−1)!/m! · (v(S∪{τ})−v(S)), over the reduced player set.
inline Rational shapley(const Database& db, const GameFunction& g, const std::string& tid,
                        std::size_t max_exact = kDefaultMaxExact, unsigned threads = 1) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    const detail::PreparedGame pg = detail::prepare_game(db, g, max_exact);
    const std::size_t idx = pg.index_of(tid);
    if (idx == pg.vars.size()) return Rational(0); // null player
    const std::size_t m = pg.vars.size();
    const detail::MarginalSums sums = detail::marginal_sums(pg, idx, threads);

    Rational total(0);
    const BigInt m_fact = factorial(m);
    for (std::size_t k = 0; k + 1 <= m; ++k) {
        const BigInt weight_num = factorial(k) * factorial(m - 1 - k);
        if (sums.boolean) {
            if (sums.counts[k] == 0) continue;
            total += Rational(weight_num * sums.counts[k], m_fact);
        } else {
            if (sums.by_size[k] == 0) continue;
            total += Rational(weight_num, m_fact) * sums.by_size[k];
        }
    }
    return total;
}

/// Banzhaf index: the subset-averaged marginal, 2^{-(m-1)} Σ_S Δ(S).
inline Rational banzhaf(const Database& db, const GameFunction& g, const std::string& tid,
                        std::size_t max_exact = kDefaultMaxExact, unsigned threads = 1) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    const detail::PreparedGame pg = detail::prepare_game(db, g, max_exact);
    const std::size_t idx = pg.index_of(tid);
    if (idx == pg.vars.size()) return Rational(0);
    const std::size_t m = pg.vars.size();
    const detail::MarginalSums sums = detail::marginal_sums(pg, idx, threads);

    Rational numer(0);
    for (std::size_t k = 0; k + 1 <= m; ++k) {
        if (sums.boolean)
            numer += sums.counts[k];
        else
            numer += sums.by_size[k];
    }
    return numer / Rational(BigInt(1) << (m - 1));
}

struct ApproxParams {
    double epsilon = 0.1;
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::uint64_t max_samples = 1000000;
};

struct McReport {
    Rational estimate = Rational(0);
    std::uint64_t samples = 0;
    bool converged = true;
};

namespace detail {

inline std::uint64_t splitmix_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + index * 0x9e3779b97f4a7c15ULL);
}

/// Uniform draw in [0, bound) by rejection, stable across platforms.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace detail

/// Shapley estimate by uniform random permutations of the relevant tuples.
/// Runs in blocks of 64 samples, each with its own RNG stream derived from
/// (seed, block), and stops once an empirical-Bernstein radius certifies
/// relative error ε with confidence 1−δ (per-block budgets δ·6/(π²b²)).
/// The estimate itself is the exact rational sample mean.
inline McReport shapley_mc(const Database& db, const GameFunction& g, const std::string& tid,
                           const ApproxParams& params = {}) {
    if (!db.contains_tid(tid)) raise(ErrorKind::UnknownTid, tid);
    if (g.kind != GameKind::Boolean)
        raise(ErrorKind::InvalidParams, "monte carlo estimation needs a boolean game");
    if (!(params.epsilon > 0)) raise(ErrorKind::InvalidParams, "epsilon must be positive");
    if (!(params.delta > 0 && params.delta < 1))
        raise(ErrorKind::InvalidParams, "delta must lie in (0,1)");
    if (params.max_samples == 0) raise(ErrorKind::InvalidParams, "sample cap must be positive");

    const detail::PreparedGame pg = detail::prepare_game(db, g, kMonteCarloVarLimit);
    const std::size_t idx = pg.index_of(tid);
    McReport report;
    if (idx == pg.vars.size()) return report; // null player: every marginal is 0

    const std::size_t m = pg.vars.size();
    const std::uint64_t subject_bit = std::uint64_t{1} << idx;
    constexpr std::uint64_t kBlock = 64;

    std::vector<std::size_t> perm(m);
    std::uint64_t ones = 0;
    std::uint64_t t = 0;
    const double target = params.epsilon / (1.0 + params.epsilon);

    for (std::uint64_t b = 1;; ++b) {
        std::mt19937_64 rng(detail::splitmix_stream(params.seed, b));
        const std::uint64_t todo = std::min<std::uint64_t>(kBlock, params.max_samples - t);
        for (std::uint64_t s = 0; s < todo; ++s) {
            for (std::size_t i = 0; i < m; ++i) perm[i] = i;
            for (std::size_t i = m; i > 1; --i)
                std::swap(perm[i - 1], perm[detail::bounded_rand(rng, i)]);
            std::uint64_t before = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (perm[i] == idx) break;
                before |= std::uint64_t{1} << perm[i];
            }
            const bool with = detail::PreparedGame::present(pg.answers.front(),
                                                            before | subject_bit);
            const bool without =
                with && detail::PreparedGame::present(pg.answers.front(), before);
            if (with && !without) ++ones;
        }
        t += todo;

        const double mean = static_cast<double>(ones) / static_cast<double>(t);
        const double variance =
            t > 1 ? mean * (1.0 - mean) * static_cast<double>(t) / static_cast<double>(t - 1)
                  : 0.25;
        const double budget =
            params.delta * 6.0 / (9.8696044010893586 * static_cast<double>(b) * static_cast<double>(b));
        const double log_term = std::log(3.0 / budget);
        const double radius = std::sqrt(2.0 * variance * log_term / static_cast<double>(t)) +
                              3.0 * log_term / static_cast<double>(t);
        if (mean > 0 && radius <= target * mean) {
            report.converged = true;
            break;
        }
        if (t >= params.max_samples) {
            report.converged = false;
            break;
        }
    }

    report.estimate = Rational(BigInt(ones), BigInt(t));
    report.samples = t;
    return report;
}

} // namespace qexplain
