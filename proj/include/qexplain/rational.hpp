#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdio>
#include <string>

namespace qexplain {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational arithmetic for every score in the library. Decimal
/// rendering happens only at the presentation layer.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

/// Display form with 6 significant digits ("0.5625", "0.333333").
inline std::string decimal_string(const Rational& r, int significant = 6) {
    const double d = r.convert_to<double>();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, d);
    return buf;
}

} // namespace qexplain
