#pragma once

#include <gmpxx.h>

#include <string>

#include "cantorlab/errors.hpp"

namespace cantorlab {

// Exact arithmetic everywhere: measure values, semimeasure weights and
// martingale capital are all Rational. Logarithms are the only inexact
// quantity in the library and live in enclosure.hpp.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// 2^k for possibly negative k.
inline Rational pow2(long k) {
    Rational q(1);
    if (k >= 0) {
        mpz_ui_pow_ui(q.get_num_mpz_t(), 2, static_cast<unsigned long>(k));
    } else {
        mpz_ui_pow_ui(q.get_den_mpz_t(), 2, static_cast<unsigned long>(-k));
    }
    return q;
}

inline Rational pow_rational(const Rational& base, unsigned long e) {
    Rational q;
    mpz_pow_ui(q.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(q.get_den_mpz_t(), base.get_den_mpz_t(), e);
    return q;  // base canonical => powers canonical
}

// Accepts "p/q" or a bare integer "p". Signs on the numerator only.
inline Rational parse_rational(const std::string& text, long line = 0, long column = 0) {
    Rational q;
    if (text.empty() || mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw ParseError("expected rational 'p/q', got '" + text + "'", line, column);
    if (mpz_sgn(q.get_den_mpz_t()) == 0)
        throw ParseError("zero denominator in '" + text + "'", line, column);
    q.canonicalize();
    return q;
}

// Canonical "p/q" form, denominator always present ("3" serializes as "3/1").
inline std::string format_rational(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// True iff q = 2^k for some integer k; stores k on success.
inline bool dyadic_log2(const Rational& q, long& k) {
    if (sgn(q) <= 0) return false;
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (num == 1) {
        size_t bits = mpz_sizeinbase(den.get_mpz_t(), 2);
        if (mpz_scan1(den.get_mpz_t(), 0) == bits - 1) {
            k = -static_cast<long>(bits - 1);
            return true;
        }
        return false;
    }
    if (den == 1) {
        size_t bits = mpz_sizeinbase(num.get_mpz_t(), 2);
        if (mpz_scan1(num.get_mpz_t(), 0) == bits - 1) {
            k = static_cast<long>(bits - 1);
            return true;
        }
        return false;
    }
    return false;
}

}  // namespace cantorlab
