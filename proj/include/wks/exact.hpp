#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "wks/errors.hpp"

namespace wks {

// All costs and weights are exact. The weight-separation regimes used by the
// adversary and the WFA analysis produce integers far beyond 64 bits.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Canonical string form: "7" for integers, "20/3" otherwise.
inline std::string to_string(const Rat& r) {
    if (den(r) == 1) return num(r).str();
    return num(r).str() + "/" + den(r).str();
}

inline Rat parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rat(Int(s));
        Int n(s.substr(0, slash));
        Int d(s.substr(slash + 1));
        if (d == 0) throw schema_error("rational with zero denominator: " + s);
        return Rat(n, d);
    } catch (const schema_error&) {
        throw;
    } catch (const std::exception&) {
        throw schema_error("malformed rational: '" + s + "'");
    }
}

/// Number of bits of x > 0, i.e. floor(log2 x) + 1. Returns 0 for x = 0.
inline std::size_t bit_length(const Int& x) {
    if (x == 0) return 0;
    return boost::multiprecision::msb(x) + 1;
}

/// Exact comparison x <= 2^e without materializing 2^e when it is huge.
inline bool le_pow2(const Int& x, const Int& e) {
    if (x <= 0) return true;
    if (e < 0) return false;
    Int bits = Int(bit_length(x)) - 1;  // floor(log2 x)
    if (bits < e) return true;
    if (bits > e) return false;
    // bits == e: equal only when x is exactly a power of two.
    return (x & (x - 1)) == 0;
}

}  // namespace wks
