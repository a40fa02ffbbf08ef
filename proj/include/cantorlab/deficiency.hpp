#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cantorlab/enclosure.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/ml_test.hpp"
#include "cantorlab/semimeasure.hpp"

namespace cantorlab {

// ===========================================================================
// Deficiency values. Every finite deficiency in this library is the binary
// logarithm of an exact positive rational ratio, so values are stored as the
// ratio itself (ordering and equality stay exact) and rendered as a certified
// enclosure only at the edge. Zero ratios are -inf, zero-measure prefixes
// with positive mass give +inf.
// ===========================================================================

class DefValue {
public:
    enum class Kind { neg_inf, finite, pos_inf };

    DefValue() : DefValue(Kind::neg_inf, 0) {}

    static DefValue neg_inf() { return DefValue(Kind::neg_inf, 0); }
    static DefValue pos_inf() { return DefValue(Kind::pos_inf, 0); }
    static DefValue of_ratio(const Rational& r) {
        if (sgn(r) < 0) throw std::domain_error("deficiency ratio must be nonnegative");
        return sgn(r) == 0 ? neg_inf() : DefValue(Kind::finite, r);
    }

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::finite; }
    const Rational& ratio() const { return ratio_; }

    Enclosure log2(int bits) const {
        switch (kind_) {
            case Kind::neg_inf: return Enclosure::neg_infinity(bits);
            case Kind::pos_inf: return Enclosure::pos_infinity(bits);
            case Kind::finite: return certified_log2(ratio_, bits);
        }
        return Enclosure(bits);
    }

    // Exact total order (finite values compare by ratio).
    int cmp(const DefValue& o) const {
        if (kind_ != o.kind_) return static_cast<int>(kind_) < static_cast<int>(o.kind_) ? -1 : 1;
        if (kind_ != Kind::finite) return 0;
        return ::cmp(ratio_, o.ratio_);
    }
    bool operator<=(const DefValue& o) const { return cmp(o) <= 0; }
    bool operator==(const DefValue& o) const { return cmp(o) == 0; }

    // The gap self - other in the log scale; empty when both ends are the
    // same infinity.
    std::optional<DefValue> minus(const DefValue& o) const {
        if (kind_ == Kind::finite && o.kind_ == Kind::finite)
            return of_ratio(Rational(ratio_ / o.ratio_));
        if (kind_ == o.kind_) return std::nullopt;
        return cmp(o) > 0 ? pos_inf() : neg_inf();
    }

    std::string render(int bits = 64) const {
        switch (kind_) {
            case Kind::neg_inf: return "-inf";
            case Kind::pos_inf: return "inf";
            default: return log2(bits).lo_decimal(15);
        }
    }

private:
    DefValue(Kind k, Rational r) : kind_(k), ratio_(std::move(r)) {}
    Kind kind_;
    Rational ratio_;
};

// --- the Gacs formula -------------------------------------------------------

struct GacsResult {
    DefValue sup_form;  // max over prefixes of log2(m(w)/mu([w]))
    DefValue sum_form;  // log2 of the prefix sum of the same ratios
};

inline GacsResult gacs_deficiency(const DiscreteSemimeasure& m, const Measure& mu,
                                  const BitString& x) {
    Rational sup_ratio = 0;
    Rational sum_ratio = 0;
    for (std::size_t n = 0; n <= x.length(); ++n) {
        BitString w = x.prefix(n);
        Rational mass = m.mass(w);
        if (sgn(mass) == 0) continue;
        Rational mw = mu.exact_value(w);
        if (sgn(mw) == 0) return {DefValue::pos_inf(), DefValue::pos_inf()};
        Rational ratio = mass / mw;
        sup_ratio = std::max(sup_ratio, ratio);
        sum_ratio += ratio;
    }
    return {DefValue::of_ratio(sup_ratio), DefValue::of_ratio(sum_ratio)};
}

// --- a-priori deficiencies along a path --------------------------------------

struct AprioriReport {
    DefValue d_sup;      // over all prefixes up to N
    DefValue d_limsup;   // max over the tail window [n0, N]
    DefValue d_liminf;   // min over the tail window
    int window_lo = 0;
    int window_hi = 0;
};

inline AprioriReport apriori_deficiencies(const ContinuousSemimeasure& a, const Measure& mu,
                                          const BitString& path, int n0, int N) {
    if (n0 < 0 || n0 > N || N > static_cast<int>(path.length()) || N > a.depth())
        throw std::domain_error("apriori window [" + std::to_string(n0) + ", " + std::to_string(N) +
                                "] outside the materialized depth");
    auto ratio_at = [&](int n) -> DefValue {
        BitString w = path.prefix(static_cast<std::size_t>(n));
        Rational aw = a.weight(w);
        if (sgn(aw) == 0) return DefValue::neg_inf();
        Rational mw = mu.exact_value(w);
        if (sgn(mw) == 0) return DefValue::pos_inf();
        return DefValue::of_ratio(Rational(aw / mw));
    };
    AprioriReport report;
    report.window_lo = n0;
    report.window_hi = N;
    report.d_sup = ratio_at(0);
    for (int n = 1; n <= N; ++n) {
        DefValue v = ratio_at(n);
        if (report.d_sup <= v) report.d_sup = v;
    }
    report.d_limsup = ratio_at(n0);
    report.d_liminf = report.d_limsup;
    for (int n = n0 + 1; n <= N; ++n) {
        DefValue v = ratio_at(n);
        if (report.d_limsup <= v) report.d_limsup = v;
        if (v <= report.d_liminf) report.d_liminf = v;
    }
    return report;
}

// --- Proposition-1 slab audit -------------------------------------------------

// One slab A_n = {2^n <= t < 2^(n+1)}. When every piece value in the slab is
// an exact power of two and (1+eps) is an integer the whole row is exact;
// otherwise the integral and bound are certified enclosures.
struct SlabRow {
    long n = 0;
    bool exact = false;
    Rational integral_exact;
    Rational bound_exact;
    Enclosure integral;
    Enclosure bound;
    bool pass = false;
};

inline std::vector<SlabRow> slab_audit(const BasicFunction& t, const Measure& mu,
                                       const Rational& eps, int bits) {
    if (sgn(eps) <= 0) throw std::domain_error("slab audit needs eps > 0");
    require_probability_bounded(t, mu);
    bool eps_integral = eps.get_den() == 1;
    long p = eps_integral ? 1 + eps.get_num().get_si() : 0;  // exponent 1+eps when integer

    // group pieces by slab index n = floor(log2 value), n >= 1
    std::map<long, std::vector<std::pair<BitString, Rational>>> slabs;
    for (const auto& [stem, value] : t.pieces()) {
        if (value < 2) continue;
        long n = 0;
        Rational v = value;
        while (v >= 2) {
            v /= 2;
            ++n;
        }
        slabs[n].emplace_back(stem, value);
    }

    std::vector<SlabRow> rows;
    for (const auto& [n, pieces] : slabs) {
        SlabRow row;
        row.n = n;
        row.integral = Enclosure(bits);
        bool exact_ok = eps_integral;
        Rational exact_sum = 0;
        for (const auto& [stem, value] : pieces) {
            long j = 0;
            if (exact_ok && dyadic_log2(value, j))
                exact_sum += value * mu.exact_value(stem) / pow_rational(rat(j), (unsigned long)p);
            else
                exact_ok = false;
        }
        Enclosure sum(bits);
        if (!exact_ok) {
            Enclosure one_plus_eps = Enclosure::of_rational(Rational(1) + eps, bits);
            for (const auto& [stem, value] : pieces) {
                Enclosure log_v = certified_log2(value, bits);
                // (log2 v)^-(1+eps) = exp2(-(1+eps) * log2(log2 v))
                Enclosure weight = (one_plus_eps * log_v.log2()).neg().exp2();
                sum = sum + weight.mul_rational(value * mu.exact_value(stem));
            }
        }
        row.exact = exact_ok;
        if (exact_ok) {
            row.integral_exact = exact_sum;
            row.bound_exact = rat(2) / pow_rational(rat(n), (unsigned long)p);
            row.integral = Enclosure::of_rational(exact_sum, bits);
            row.bound = Enclosure::of_rational(row.bound_exact, bits);
            row.pass = row.integral_exact <= row.bound_exact;
        } else {
            row.integral = sum;
            Enclosure one_plus_eps = Enclosure::of_rational(Rational(1) + eps, bits);
            row.bound = (one_plus_eps * certified_log2(rat(n), bits).log2()).neg().exp2()
                            .mul_rational(rat(2));
            row.pass = row.integral.certainly_le(row.bound);
        }
        if (!row.pass)
            throw NotProbabilityBounded("slab integral exceeds 2*n^-(1+eps) at n = " +
                                            std::to_string(n),
                                        std::to_string(n));
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- Proposition-3 Markov/prefix-free audit -----------------------------------

struct MarkovAudit {
    int c = 0;
    std::vector<BitString> stems;  // minimal crossing stems, prefix-free
    Rational mu_mass;              // sum of mu over S
    Rational a_mass;               // sum of a over S
    Rational bound;                // 2^-c
    bool pass = false;
};

// S = minimal stems with a(x)/mu([x]) > 2^c; then mu(S) < a(S)/2^c <= 2^-c.
inline MarkovAudit markov_prefixfree_audit(const ContinuousSemimeasure& a, const Measure& mu,
                                           int c) {
    MarkovAudit audit;
    audit.c = c;
    audit.bound = pow2(-c);
    audit.mu_mass = 0;
    audit.a_mass = 0;
    Rational two_c = pow2(c);
    std::vector<BitString> stack{BitString()};
    while (!stack.empty()) {
        BitString x = std::move(stack.back());
        stack.pop_back();
        Rational ax = a.weight(x);
        if (sgn(ax) == 0) continue;
        if (ax > two_c * mu.exact_value(x)) {
            audit.mu_mass += mu.exact_value(x);
            audit.a_mass += ax;
            audit.stems.push_back(std::move(x));
            continue;  // minimality: do not descend past a crossing
        }
        if (static_cast<int>(x.length()) == a.depth()) continue;
        stack.push_back(x.child(1));
        stack.push_back(x.child(0));
    }
    // prefix-freeness is structural; re-check defensively
    auto cover = PrefixCover::of(audit.stems);
    audit.pass = cover.stems().size() == audit.stems.size() &&
                 audit.mu_mass <= audit.bound &&
                 (audit.stems.empty() || audit.mu_mass < audit.a_mass / two_c) &&
                 audit.a_mass / two_c <= audit.bound;
    return audit;
}

// --- the full chain report ------------------------------------------------------

struct ChainReport {
    int d_p = 0;             // test deficiency along the path
    GacsResult d_e;          // expectation-bounded deficiency, both forms
    AprioriReport d_a;       // sup / limsup / liminf proxies, same semimeasure
    bool same_family_order_ok = false;
    std::optional<DefValue> gap_sup_minus_limsup;
    std::optional<DefValue> gap_p_minus_a;  // log-scale d^P proxy minus d^A proxy
};

inline ChainReport chain_report(const DiscreteSemimeasure& m, const ContinuousSemimeasure& a,
                                const MLTest& test, const Measure& mu, const BitString& path,
                                int window_lo, int window_hi) {
    ChainReport report;
    report.d_p = test.deficiency(path);
    report.d_e = gacs_deficiency(m, mu, path);
    report.d_a = apriori_deficiencies(a, mu, path, window_lo, window_hi);
    report.same_family_order_ok =
        report.d_a.d_liminf <= report.d_a.d_limsup && report.d_a.d_limsup <= report.d_a.d_sup;
    // the same-family part of the chain is an exact assertion, not a report
    if (!report.same_family_order_ok)
        throw std::logic_error("liminf/limsup/sup proxies violated their order");
    report.gap_sup_minus_limsup = report.d_a.d_sup.minus(report.d_a.d_limsup);
    report.gap_p_minus_a = DefValue::of_ratio(pow2(report.d_p)).minus(report.d_a.d_sup);
    return report;
}

}  // namespace cantorlab
