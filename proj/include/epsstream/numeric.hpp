#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epsstream {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Int128 = __int128;

// Fixed-width, overflow-checked integers for exact predicates whose operands
// outgrow 128 bits (in-circle tests, homogeneous rational points).
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<
    512, 512, boost::multiprecision::signed_magnitude, boost::multiprecision::checked, void>>;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
constexpr int sign_of(const T& v) {
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

/// num / den for any nonzero den (the two-argument constructor rejects
/// negative denominators).
inline Rational ratio(BigInt num, BigInt den) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(num, den);
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) { return ratio(BigInt(num), BigInt(den)); }

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

/// Exact "num/den" text (den omitted when 1).
inline std::string to_string(const Rational& r) {
    const BigInt den = denominator_of(r);
    if (den == 1) return numerator_of(r).str();
    return numerator_of(r).str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline long double to_long_double(const Rational& r) { return r.convert_to<long double>(); }

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline BigInt parse_digits(std::string_view s) {
    BigInt v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw ParseError("invalid digit in number");
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace detail

/// Parses "12", "-3.25", "1e-3", "7/8" exactly.
inline Rational parse_rational(std::string_view text) {
    std::string_view s = detail::trim(text);
    if (s.empty()) throw ParseError("empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator");
        return num / den;
    }
    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (exp_text.empty() || exp_text.size() > 6) throw ParseError("bad exponent");
        exponent = static_cast<long>(detail::parse_digits(exp_text));
        if (exp_negative) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) throw ParseError("no digits in number");
    BigInt mantissa = detail::parse_digits(int_part);
    for (char c : frac_part) {
        if (c < '0' || c > '9') throw ParseError("invalid digit in number");
        mantissa = mantissa * 10 + (c - '0');
    }
    exponent -= static_cast<long>(frac_part.size());
    BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    Rational value = exponent < 0 ? Rational(mantissa, ten_power) : Rational(mantissa * ten_power);
    return negative ? Rational(-value) : value;
}

/// Round half away from zero.
inline BigInt round_nearest(const Rational& r) {
    const BigInt num = numerator_of(r);
    const BigInt den = denominator_of(r);
    BigInt twice = 2 * boost::multiprecision::abs(num) + den;
    BigInt q = twice / (2 * den);
    return num < 0 ? BigInt(-q) : q;
}

inline BigInt floor_of(const Rational& r) {
    const BigInt num = numerator_of(r);
    const BigInt den = denominator_of(r);
    BigInt q = num / den;
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

inline BigInt ceil_of(const Rational& r) { return -floor_of(-r); }

}  // namespace epsstream
