#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

namespace shiftnet {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return Rational(Integer(num), Integer(den));
}

/// base^exponent for any integer exponent (base must be nonzero when exponent < 0).
inline Rational pow_int(const Rational& base, long exponent) {
    Rational result = 1;
    Rational factor = exponent >= 0 ? base : Rational(1) / base;
    unsigned long e = exponent >= 0 ? static_cast<unsigned long>(exponent)
                                    : static_cast<unsigned long>(-exponent);
    while (e != 0) {
        if (e & 1UL) result *= factor;
        factor *= factor;
        e >>= 1UL;
    }
    return result;
}

inline Integer floor_int(const Rational& r) {
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    Integer q = num / den;
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

inline std::string to_fraction_string(const Rational& r) {
    const Integer den = boost::multiprecision::denominator(r);
    if (den == 1) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

/// Decimal rendering rounded half away from zero at `digits` fractional digits.
inline std::string to_decimal_string(const Rational& r, int digits) {
    if (digits < 0) digits = 0;
    const bool negative = r < 0;
    const Rational magnitude = negative ? Rational(-r) : r;
    Integer scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const Rational scaled = magnitude * Rational(scale) + Rational(1, 2);
    const Integer rounded = floor_int(scaled);
    std::string text = Integer(rounded / scale).str();
    if (digits > 0) {
        std::string frac = Integer(rounded % scale).str();
        text += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
    }
    if (negative && rounded != 0) text = "-" + text;
    return text;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace shiftnet
