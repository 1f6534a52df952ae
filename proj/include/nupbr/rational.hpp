// Exact rational arithmetic used everywhere in the engine. No floats, ever:
// every identity this library checks is an exact "== 0" statement, so a
// single rounding step would turn theorem checks into noise.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace nupbr {

// Arbitrary-precision rational, kept in lowest terms with positive
// denominator by the backend.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

// Canonical text form: "num/den", or just "num" when den == 1.
inline std::string rat_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Parses "num", "num/den" or "-num/den". Decimal notation is rejected:
// model files must stay exact and auditable.
inline Rational rat_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational: empty string");
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos)
        throw std::invalid_argument("rational: decimal notation not allowed: '" + s + "'");
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s), BigInt(1));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den <= 0) throw std::invalid_argument("rational: non-positive denominator: '" + s + "'");
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("rational: malformed value: '" + s + "'");
    }
}

inline bool is_zero(const Rational& r) { return r.is_zero(); }

using RatVec = std::vector<Rational>;

}  // namespace nupbr
