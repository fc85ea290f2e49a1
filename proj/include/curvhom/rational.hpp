#ifndef CURVHOM_RATIONAL_HPP
#define CURVHOM_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace curvhom {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

// "num/den" with the slash omitted for integers; always the canonical reduced form.
inline std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// 17 significant digits round-trip every IEEE double.
inline std::string double_to_string(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::optional<Integer> integer_nth_root(const Integer& v, unsigned n) {
    if (v < 0) return std::nullopt;
    if (v == 0 || v == 1 || n == 1) return v;
    Integer lo = 0, hi = v;
    while (lo < hi) {
        Integer mid = (lo + hi) / 2;
        Integer powv = 1;
        bool over = false;
        for (unsigned i = 0; i < n && !over; ++i) {
            powv *= mid;
            if (powv > v) over = true;
        }
        if (over) hi = mid; else if (powv == v) return mid; else lo = mid + 1;
    }
    Integer powv = 1;
    for (unsigned i = 0; i < n; ++i) powv *= lo;
    if (powv == v) return lo;
    return std::nullopt;
}

// Exact rational n-th root when one exists; rationals are rooted componentwise
// since numerator/denominator of a reduced fraction are coprime.
inline std::optional<Rational> rational_nth_root(const Rational& r, unsigned n) {
    if (r < 0) return std::nullopt;
    auto nr = integer_nth_root(numerator(r), n);
    if (!nr) return std::nullopt;
    auto dr = integer_nth_root(denominator(r), n);
    if (!dr) return std::nullopt;
    return Rational(*nr, *dr);
}

inline std::optional<Rational> rational_sqrt(const Rational& r) { return rational_nth_root(r, 2); }

inline Rational rational_pow(const Rational& base, long long e) {
    if (e == 0) return Rational(1);
    Rational b = base;
    long long n = e;
    if (n < 0) {
        if (b == 0) throw std::domain_error("0 to a negative power");
        b = Rational(1) / b;
        n = -n;
    }
    Rational acc(1);
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

} // namespace curvhom

#endif
