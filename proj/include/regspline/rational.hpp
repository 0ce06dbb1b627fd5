#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "regspline/error.hpp"

namespace regspline {

using Int = mpz_class;
using Rational = mpq_class;

/// Exact rational point in d dimensions.
using Point = std::vector<Rational>;

inline Rational make_rational(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Int pow_int(long base, unsigned exp) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exp);
    return r;
}

/// 2^exp as an exact rational, exp may be negative.
inline Rational pow2(int exp) {
    if (exp >= 0)
        return Rational(pow_int(2, static_cast<unsigned>(exp)));
    Rational q(Int(1), pow_int(2, static_cast<unsigned>(-exp)));
    q.canonicalize();
    return q;
}

/// Parses "p", "-p" or "p/q" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw parse_error("empty rational");
    Rational q;
    // mpq_set_str accepts the "p/q" syntax but tolerates a zero denominator,
    // which would trap later during canonicalisation.
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw parse_error("malformed rational: " + text);
    if (q.get_den() == 0) throw parse_error("zero denominator: " + text);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ' ';
        s += p[i].get_str();
    }
    return s;
}

inline Rational floor_rational(const Rational& q) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return Rational(f);
}

inline Point point_add(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw usage_error("point_add: dimension mismatch");
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Point point_sub(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw usage_error("point_sub: dimension mismatch");
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Point point_neg(const Point& a) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline bool is_zero_point(const Point& a) {
    for (const auto& q : a)
        if (q != 0) return false;
    return true;
}

} // namespace regspline
