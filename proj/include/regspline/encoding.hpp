#pragma once

#include <string>
#include <utility>
#include <vector>

#include "regspline/error.hpp"
#include "regspline/rational.hpp"

namespace regspline {

/// Numeration base. Must be even so that 1/2 has a finite expansion.
struct Base {
    int value = 2;

    Base() = default;
    explicit Base(int b) : value(b) {
        if (b < 2 || b % 2 != 0) throw usage_error("base must be even and >= 2");
    }
};

/// Canonical b-adic rational: numerator / base^exponent with the exponent
/// minimal (exponent == 0, or numerator not divisible by the base).
struct DyadicRational {
    Int numerator = 0;
    unsigned exponent = 0;
    int base = 2;

    DyadicRational() = default;

    DyadicRational(const Rational& value, Base b) : base(b.value) {
        Int den = value.get_den();
        Int rem = den;
        while (rem != 1) {
            Int g;
            mpz_gcd_ui(g.get_mpz_t(), rem.get_mpz_t(), static_cast<unsigned long>(base));
            if (g == 1)
                throw representation_error("value " + value.get_str() +
                                           " is not representable in base " + std::to_string(base));
            mpz_divexact(rem.get_mpz_t(), rem.get_mpz_t(), g.get_mpz_t());
            ++exponent;
        }
        numerator = value.get_num() * pow_int(base, exponent) / den;
        while (exponent > 0 && numerator % base == 0) {
            numerator /= base;
            --exponent;
        }
    }

    Rational value() const {
        Rational q(numerator, pow_int(base, exponent));
        q.canonicalize();
        return q;
    }
};

/// Sign-prefixed two-row digit string.  The first column is (0,0) for
/// nonnegative values and (1,1) for negative ones; column i holds the digit
/// pair (alpha_i, beta_i) contributing alpha_i * b^(i-1) + beta_i * b^-i.
/// Zero is the bare sign column.  The last digit column is never (0,0).
struct EncodedNumber {
    int base = 2;
    bool negative = false;
    std::vector<std::pair<int, int>> columns; // (integer row, fraction row)

    bool is_zero() const { return columns.empty(); }
    std::size_t length() const { return columns.size() + 1; }

    /// Per-letter symbol codes including the sign column: alpha * base + beta.
    std::vector<int> symbol_codes() const {
        std::vector<int> out;
        out.reserve(columns.size() + 1);
        out.push_back(negative ? base + 1 : 0);
        for (auto [a, f] : columns) out.push_back(a * base + f);
        return out;
    }
};

inline EncodedNumber encode(const Rational& value, Base b) {
    DyadicRational d(value, b);
    EncodedNumber enc;
    enc.base = b.value;
    if (d.numerator == 0) return enc;
    enc.negative = d.numerator < 0;
    Int mag = abs(d.numerator);
    Int scale = pow_int(b.value, d.exponent);
    Int ipart = mag / scale;
    Int fpart = mag % scale;

    std::vector<int> alpha; // least significant first
    for (Int i = ipart; i != 0; i /= b.value)
        alpha.push_back(static_cast<int>(mpz_class(i % b.value).get_si()));
    std::vector<int> frac_digits(d.exponent, 0); // frac_digits[j] = coefficient of b^j in fpart
    {
        Int f = fpart;
        for (unsigned j = 0; j < d.exponent && f != 0; ++j, f /= b.value)
            frac_digits[j] = static_cast<int>(mpz_class(f % b.value).get_si());
    }
    std::size_t k = std::max(alpha.size(), static_cast<std::size_t>(d.exponent));
    enc.columns.resize(k, {0, 0});
    for (std::size_t i = 0; i < alpha.size(); ++i) enc.columns[i].first = alpha[i];
    for (unsigned i = 1; i <= d.exponent; ++i)
        enc.columns[i - 1].second = frac_digits[d.exponent - i];
    return enc;
}

inline Rational decode(const EncodedNumber& enc) {
    Rational total(0);
    Rational ipow(1);
    Rational fpow(1, enc.base);
    fpow.canonicalize();
    for (auto [a, f] : enc.columns) {
        total += a * ipow + f * fpow;
        ipow *= enc.base;
        fpow /= enc.base;
    }
    if (enc.negative) total = -total;
    total.canonicalize();
    return total;
}

/// Validity check mirroring the encoding language: digits in range, sign
/// consistent, last digit column nonzero.
inline bool is_valid_encoding(const EncodedNumber& enc) {
    if (enc.base < 2 || enc.base % 2 != 0) return false;
    for (auto [a, f] : enc.columns)
        if (a < 0 || a >= enc.base || f < 0 || f >= enc.base) return false;
    if (enc.columns.empty()) return !enc.negative;
    auto [a, f] = enc.columns.back();
    return a != 0 || f != 0;
}

/// Two-row display, sign column first, e.g. -27/8 in base 2 is "1110/1011".
/// Digits must fit one character (base <= 10).
inline std::string to_string(const EncodedNumber& enc) {
    if (enc.base > 10) throw usage_error("string form requires base <= 10");
    std::string top(1, enc.negative ? '1' : '0');
    std::string bottom(1, enc.negative ? '1' : '0');
    for (auto [a, f] : enc.columns) {
        top += static_cast<char>('0' + a);
        bottom += static_cast<char>('0' + f);
    }
    return top + "/" + bottom;
}

inline EncodedNumber parse_encoding(const std::string& text, Base b) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw parse_error("encoding needs two rows: " + text);
    std::string top = text.substr(0, slash);
    std::string bottom = text.substr(slash + 1);
    if (top.size() != bottom.size() || top.empty())
        throw parse_error("encoding rows must be nonempty and equal length: " + text);
    auto digit = [&](char c) {
        if (c < '0' || c >= '0' + b.value) throw parse_error("digit out of range: " + text);
        return c - '0';
    };
    EncodedNumber enc;
    enc.base = b.value;
    int s_top = digit(top[0]), s_bottom = digit(bottom[0]);
    if (s_top != s_bottom || (s_top != 0 && s_top != 1))
        throw parse_error("bad sign column: " + text);
    enc.negative = s_top == 1;
    for (std::size_t i = 1; i < top.size(); ++i)
        enc.columns.emplace_back(digit(top[i]), digit(bottom[i]));
    if (!is_valid_encoding(enc)) throw parse_error("not a canonical encoding: " + text);
    return enc;
}

/// Encodes every coordinate of an exact rational point.
inline std::vector<EncodedNumber> encode_point(const Point& p, Base b) {
    std::vector<EncodedNumber> out;
    out.reserve(p.size());
    for (const auto& q : p) out.push_back(encode(q, b));
    return out;
}

inline Point decode_point(const std::vector<EncodedNumber>& encs) {
    Point out;
    out.reserve(encs.size());
    for (const auto& e : encs) out.push_back(decode(e));
    return out;
}

} // namespace regspline
