#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace salem {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parse "p/q" or a plain integer "p" into an exact rational.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("rational: cannot parse '" + s + "'");
    }
}

inline std::string format_rational(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Exact 2^-k as a rational (k >= 0).
inline Rational dyadic_unit(int k) {
    if (k < 0) throw std::invalid_argument("dyadic_unit: negative level");
    return Rational(1, BigInt(1) << k);
}

/// Closed interval with exact rational endpoints.
struct RatInterval {
    Rational lo;
    Rational hi;

    Rational length() const { return hi - lo; }
};

}  // namespace salem
