#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

#include "cantorlab/errors.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

// ===========================================================================
// Certified interval arithmetic.
//
// An Enclosure is a pair lo <= hi of MPFR floats such that the (exact, often
// irrational) quantity it stands for lies in [lo, hi]. Every operation rounds
// lo down and hi up, so enclosures stay certified under composition. The
// `bits` parameter counts fractional bits of the requested resolution; the
// internal mantissa carries 64 guard bits on top, which keeps the width of a
// fresh log2 enclosure below 2^(-bits+2) for any argument this library
// produces (magnitudes stay far below 2^60).
// ===========================================================================

namespace detail {

class MpfrValue {
public:
    explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    MpfrValue(const MpfrValue& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);  // same precision: exact
    }
    MpfrValue(MpfrValue&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    MpfrValue& operator=(const MpfrValue& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpfrValue& operator=(MpfrValue&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpfrValue() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

}  // namespace detail

class Enclosure {
public:
    static constexpr int kGuardBits = 64;
    static constexpr int kMinBits = 32;
    static constexpr int kMaxBits = 4096;

    explicit Enclosure(int bits = 128)
        : bits_(bits), lo_(prec(bits)), hi_(prec(bits)) {
        mpfr_set_zero(lo_.get(), 1);
        mpfr_set_zero(hi_.get(), 1);
    }

    // --- constructors -----------------------------------------------------

    static Enclosure of_rational(const Rational& q, int bits) {
        Enclosure e(bits);
        mpfr_set_q(e.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(e.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        return e;
    }

    static Enclosure of_long(long v, int bits) {
        Enclosure e(bits);
        mpfr_set_si(e.lo_.get(), v, MPFR_RNDD);
        mpfr_set_si(e.hi_.get(), v, MPFR_RNDU);
        return e;
    }

    // Certified log2 of a positive rational; the heart of HPLog.
    static Enclosure log2_of(const Rational& q, int bits) {
        if (sgn(q) <= 0)
            throw std::domain_error("certified_log2: argument must be positive, got " +
                                    format_rational(q));
        Enclosure e(bits);
        detail::MpfrValue t(prec(bits));
        mpfr_set_q(t.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_log2(e.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_set_q(t.get(), q.get_mpq_t(), MPFR_RNDU);
        mpfr_log2(e.hi_.get(), t.get(), MPFR_RNDU);
        return e;
    }

    static Enclosure pos_infinity(int bits) {
        Enclosure e(bits);
        mpfr_set_inf(e.lo_.get(), 1);
        mpfr_set_inf(e.hi_.get(), 1);
        return e;
    }

    static Enclosure neg_infinity(int bits) {
        Enclosure e(bits);
        mpfr_set_inf(e.lo_.get(), -1);
        mpfr_set_inf(e.hi_.get(), -1);
        return e;
    }

    int bits() const { return bits_; }
    bool is_pos_inf() const { return mpfr_inf_p(lo_.get()) && mpfr_sgn(lo_.get()) > 0; }
    bool is_neg_inf() const { return mpfr_inf_p(hi_.get()) && mpfr_sgn(hi_.get()) < 0; }
    bool finite() const { return mpfr_number_p(lo_.get()) && mpfr_number_p(hi_.get()); }

    // --- arithmetic ---------------------------------------------------------

    friend Enclosure operator+(const Enclosure& a, const Enclosure& b) {
        Enclosure e(std::min(a.bits_, b.bits_));
        mpfr_add(e.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(e.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        e.check();
        return e;
    }

    friend Enclosure operator-(const Enclosure& a, const Enclosure& b) {
        Enclosure e(std::min(a.bits_, b.bits_));
        mpfr_sub(e.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(e.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        e.check();
        return e;
    }

    friend Enclosure operator*(const Enclosure& a, const Enclosure& b) {
        Enclosure e(std::min(a.bits_, b.bits_));
        detail::MpfrValue t(prec(e.bits_));
        bool first = true;
        auto consider = [&](mpfr_srcptr x, mpfr_srcptr y) {
            mpfr_mul(t.get(), x, y, MPFR_RNDD);
            if (first || mpfr_cmp(t.get(), e.lo_.get()) < 0) mpfr_set(e.lo_.get(), t.get(), MPFR_RNDD);
            mpfr_mul(t.get(), x, y, MPFR_RNDU);
            if (first || mpfr_cmp(t.get(), e.hi_.get()) > 0) mpfr_set(e.hi_.get(), t.get(), MPFR_RNDU);
            first = false;
        };
        consider(a.lo_.get(), b.lo_.get());
        consider(a.lo_.get(), b.hi_.get());
        consider(a.hi_.get(), b.lo_.get());
        consider(a.hi_.get(), b.hi_.get());
        e.check();
        return e;
    }

    Enclosure neg() const {
        Enclosure e(bits_);
        mpfr_neg(e.lo_.get(), hi_.get(), MPFR_RNDD);
        mpfr_neg(e.hi_.get(), lo_.get(), MPFR_RNDU);
        return e;
    }

    // Reciprocal of a sign-definite enclosure.
    Enclosure recip() const {
        if (!(mpfr_sgn(lo_.get()) > 0 || mpfr_sgn(hi_.get()) < 0))
            throw std::domain_error("enclosure reciprocal: interval straddles zero");
        Enclosure e(bits_);
        mpfr_ui_div(e.lo_.get(), 1, hi_.get(), MPFR_RNDD);
        mpfr_ui_div(e.hi_.get(), 1, lo_.get(), MPFR_RNDU);
        e.check();
        return e;
    }

    Enclosure exp2() const {
        Enclosure e(bits_);
        mpfr_exp2(e.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_exp2(e.hi_.get(), hi_.get(), MPFR_RNDU);
        e.check();
        return e;
    }

    // log2 of a strictly positive enclosure.
    Enclosure log2() const {
        if (mpfr_sgn(lo_.get()) <= 0)
            throw std::domain_error("enclosure log2: interval not strictly positive");
        Enclosure e(bits_);
        mpfr_log2(e.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_log2(e.hi_.get(), hi_.get(), MPFR_RNDU);
        e.check();
        return e;
    }

    Enclosure add_rational(const Rational& q) const {
        Enclosure e(bits_);
        mpfr_add_q(e.lo_.get(), lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_add_q(e.hi_.get(), hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        e.check();
        return e;
    }

    Enclosure mul_rational(const Rational& q) const {
        Enclosure e(bits_);
        if (sgn(q) >= 0) {
            mpfr_mul_q(e.lo_.get(), lo_.get(), q.get_mpq_t(), MPFR_RNDD);
            mpfr_mul_q(e.hi_.get(), hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        } else {
            mpfr_mul_q(e.lo_.get(), hi_.get(), q.get_mpq_t(), MPFR_RNDD);
            mpfr_mul_q(e.hi_.get(), lo_.get(), q.get_mpq_t(), MPFR_RNDU);
        }
        e.check();
        return e;
    }

    friend Enclosure rational_div(const Rational& q, const Enclosure& denom) {
        return denom.recip().mul_rational(q);
    }

    // --- comparisons (all decisions are at enclosure endpoints) -------------

    bool certainly_lt(const Rational& q) const { return mpfr_cmp_q(hi_.get(), q.get_mpq_t()) < 0; }
    bool certainly_le(const Rational& q) const { return mpfr_cmp_q(hi_.get(), q.get_mpq_t()) <= 0; }
    bool certainly_gt(const Rational& q) const { return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) > 0; }
    bool certainly_ge(const Rational& q) const { return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) >= 0; }

    bool certainly_lt(const Enclosure& o) const { return mpfr_cmp(hi_.get(), o.lo_.get()) < 0; }
    bool certainly_le(const Enclosure& o) const { return mpfr_cmp(hi_.get(), o.lo_.get()) <= 0; }
    bool certainly_gt(const Enclosure& o) const { return o.certainly_lt(*this); }
    bool certainly_ge(const Enclosure& o) const { return o.certainly_le(*this); }

    // True enclosures of one value always intersect; used as the tolerance
    // test for identities checked along two routes.
    bool intersects(const Enclosure& o) const {
        return !(certainly_lt(o) || o.certainly_lt(*this));
    }

    bool contains(const Rational& q) const {
        return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 &&
               mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
    }

    // q strictly below the whole interval, i.e. q < lo. This is the stop rule
    // used for "measure falls strictly below the target".
    bool rational_below(const Rational& q) const {
        return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) > 0;
    }

    double lo_double() const { return mpfr_get_d(lo_.get(), MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_.get(), MPFR_RNDU); }
    double mid_double() const { return (lo_double() + hi_double()) / 2; }
    double width_double() const {
        detail::MpfrValue t(prec(bits_));
        mpfr_sub(t.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        return mpfr_get_d(t.get(), MPFR_RNDU);
    }

    // Directed decimal rendering; `sig` significant digits.
    std::string lo_decimal(int sig = 15) const { return render(lo_.get(), sig, MPFR_RNDD); }
    std::string hi_decimal(int sig = 15) const { return render(hi_.get(), sig, MPFR_RNDU); }

private:
    static mpfr_prec_t prec(int bits) { return static_cast<mpfr_prec_t>(bits) + kGuardBits; }

    void check() const {
        if (mpfr_nan_p(lo_.get()) || mpfr_nan_p(hi_.get()))
            throw std::logic_error("enclosure arithmetic produced NaN");
    }

    static std::string render(mpfr_srcptr v, int sig, mpfr_rnd_t rnd) {
        if (mpfr_inf_p(v)) return mpfr_sgn(v) > 0 ? "inf" : "-inf";
        char buf[64];
        mpfr_snprintf(buf, sizeof buf, "%.*R*e", sig - 1, rnd, v);
        return buf;
    }

    int bits_;
    detail::MpfrValue lo_;
    detail::MpfrValue hi_;
};

// The spec-facing name for the certified binary logarithm.
inline Enclosure certified_log2(const Rational& q, int precision_bits) {
    return Enclosure::log2_of(q, precision_bits);
}

}  // namespace cantorlab
