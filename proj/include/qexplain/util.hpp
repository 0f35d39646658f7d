#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

namespace qexplain {

/// Orders strings so that embedded digit runs compare numerically:
/// t2 < t10, while purely textual parts compare as characters.
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t i0 = i, j0 = j;
            while (i < a.size() && std::isdigit(static_cast<unsigned char>(a[i]))) ++i;
            while (j < b.size() && std::isdigit(static_cast<unsigned char>(b[j]))) ++j;
            std::string na = a.substr(i0, i - i0), nb = b.substr(j0, j - j0);
            std::string ta = na.substr(na.find_first_not_of('0') == std::string::npos
                                           ? na.size() - 1
                                           : na.find_first_not_of('0'));
            std::string tb = nb.substr(nb.find_first_not_of('0') == std::string::npos
                                           ? nb.size() - 1
                                           : nb.find_first_not_of('0'));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            // equal value, fewer leading zeros first for a total order
            if (na.size() != nb.size()) return na.size() < nb.size();
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

struct NaturalLess {
    bool operator()(const std::string& a, const std::string& b) const { return natural_less(a, b); }
};

/// Sorted-unique set of tuple identifiers in natural order.
using TidSet = std::vector<std::string>;

inline void normalize_tids(TidSet& s) {
    std::sort(s.begin(), s.end(), NaturalLess{});
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline TidSet make_tid_set(std::vector<std::string> tids) {
    normalize_tids(tids);
    return tids;
}

inline bool tid_set_contains(const TidSet& s, const std::string& tid) {
    return std::binary_search(s.begin(), s.end(), tid, NaturalLess{});
}

/// a subset-of b; both sorted-unique in natural order.
inline bool tid_subset(const TidSet& a, const TidSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end(), NaturalLess{});
}

inline bool tid_set_less(const TidSet& a, const TidSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), NaturalLess{});
}

/// Canonical order for collections of tid sets: by size, then elementwise.
inline bool tid_set_canonical_less(const TidSet& a, const TidSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return tid_set_less(a, b);
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// splitmix64; used to derive independent, reproducible sample streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace qexplain
