#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantorlab/bitstring.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

enum class MeasureKind { uniform, bernoulli, branching, point, mixture, oracle };

// Per-node probability of emitting bit 0 in a branching measure. Stem entries
// override depth entries override the default. Depth is 0-based: the entry
// for depth d governs the (d+1)-th bit.
struct BranchingWeights {
    Rational default_p0{1, 2};
    std::map<long, Rational> by_depth;
    std::map<BitString, Rational> by_stem;

    const Rational& p0_after(const BitString& stem) const {
        if (auto it = by_stem.find(stem); it != by_stem.end()) return it->second;
        if (auto it = by_depth.find(static_cast<long>(stem.length())); it != by_depth.end())
            return it->second;
        return default_p0;
    }
};

struct NonatomicAudit {
    BitString branch;                // the heavy branch followed
    std::vector<Rational> mu_chain;  // mu(B_1), ..., mu(B_depth)
    Rational threshold;
    bool atom_suspected = false;
};

// A computable probability measure on Cantor space. All kinds except
// `oracle` are exact: interval measures are Rational with no rounding.
// The oracle kind wraps an exact measure behind the Definition-1 style
// approximation contract (answers are eps-approximations on a fixed
// schedule eps_i = 2^-i, up to a stage budget).
class Measure {
public:
    static Measure uniform() { return Measure(MeasureKind::uniform); }

    // p = probability of emitting bit 1.
    static Measure bernoulli(Rational p) {
        if (sgn(p) < 0 || p > 1)
            throw MalformedMeasure("bernoulli parameter outside [0,1]: " + format_rational(p));
        Measure m(MeasureKind::bernoulli);
        m.p1_ = std::move(p);
        return m;
    }

    static Measure branching(BranchingWeights w) {
        auto in_range = [](const Rational& p) { return sgn(p) >= 0 && p <= 1; };
        if (!in_range(w.default_p0))
            throw MalformedMeasure("branching weight outside [0,1]");
        for (const auto& [d, p] : w.by_depth)
            if (d < 0 || !in_range(p)) throw MalformedMeasure("branching weight outside [0,1]");
        for (const auto& [s, p] : w.by_stem)
            if (!in_range(p)) throw MalformedMeasure("branching weight outside [0,1]");
        Measure m(MeasureKind::branching);
        m.branching_ = std::move(w);
        return m;
    }

    // Point mass on the ultimately periodic sequence prefix . period^inf.
    static Measure point(BitString prefix, BitString period) {
        if (period.empty()) throw MalformedMeasure("point mass needs a nonempty period");
        Measure m(MeasureKind::point);
        m.point_prefix_ = std::move(prefix);
        m.point_period_ = std::move(period);
        return m;
    }

    static Measure mixture(std::vector<Measure> parts, std::vector<Rational> weights) {
        if (parts.empty() || parts.size() != weights.size())
            throw MalformedMeasure("mixture needs matching nonempty parts and weights");
        Rational sum = 0;
        for (const auto& w : weights) {
            if (sgn(w) < 0) throw MalformedMeasure("negative mixture weight");
            sum += w;
        }
        if (sum != 1) throw MalformedMeasure("mixture weights must sum to 1, got " + format_rational(sum));
        for (const auto& p : parts)
            if (!p.exact()) throw MalformedMeasure("mixture parts must be exact measures");
        Measure m(MeasureKind::mixture);
        m.parts_ = std::move(parts);
        m.part_weights_ = std::move(weights);
        return m;
    }

    // Wraps an exact measure behind the approximation contract.
    static Measure oracle_view(Measure inner, int stage_budget) {
        if (!inner.exact()) throw MalformedMeasure("oracle wrapper takes an exact measure");
        if (stage_budget < 1) throw MalformedMeasure("oracle stage budget must be >= 1");
        Measure m(MeasureKind::oracle);
        m.oracle_inner_ = std::make_shared<Measure>(std::move(inner));
        m.oracle_budget_ = stage_budget;
        return m;
    }

    MeasureKind kind() const { return kind_; }
    bool exact() const { return kind_ != MeasureKind::oracle; }
    int oracle_budget() const { return oracle_budget_; }
    const Measure& oracle_inner() const { return *oracle_inner_; }
    const Rational& bernoulli_p1() const { return p1_; }
    const BranchingWeights& branching_weights() const { return branching_; }
    const BitString& point_prefix() const { return point_prefix_; }
    const BitString& point_period() const { return point_period_; }
    const std::vector<Measure>& mixture_parts() const { return parts_; }
    const std::vector<Rational>& mixture_weights() const { return part_weights_; }

    // mu([x]) exactly; oracle kind refuses (only approximations exist there).
    Rational exact_value(const BitString& x) const {
        switch (kind_) {
            case MeasureKind::uniform:
                return pow2(-static_cast<long>(x.length()));
            case MeasureKind::bernoulli: {
                Rational v = 1;
                Rational p0 = Rational(1) - p1_;
                for (std::size_t i = 0; i < x.length(); ++i) v *= x.bit(i) ? p1_ : p0;
                return v;
            }
            case MeasureKind::branching: {
                Rational v = 1;
                for (std::size_t i = 0; i < x.length(); ++i) {
                    const Rational& p0 = branching_.p0_after(x.prefix(i));
                    v *= x.bit(i) ? Rational(1) - p0 : p0;
                    if (sgn(v) == 0) return v;
                }
                return v;
            }
            case MeasureKind::point:
                return matches_point(x) ? Rational(1) : Rational(0);
            case MeasureKind::mixture: {
                Rational v = 0;
                for (std::size_t j = 0; j < parts_.size(); ++j)
                    v += part_weights_[j] * parts_[j].exact_value(x);
                return v;
            }
            case MeasureKind::oracle:
                throw PrecisionExhausted("oracle measure has no exact values; use measure_of");
        }
        return 0;
    }

    // The Definition-1 contract: |result - mu([x])| <= eps, result in [0,1].
    // Exact kinds ignore eps and return the exact value.
    Rational measure_of(const BitString& x, const Rational& eps) const {
        if (exact()) return exact_value(x);
        if (sgn(eps) <= 0) throw std::domain_error("measure_of: eps must be positive");
        int stage = stage_for(eps);
        return oracle_answer(x, stage);
    }

    std::pair<Rational, Rational> children_split(const BitString& x, const Rational& eps) const {
        if (exact()) {
            Rational m0 = exact_value(x.child(0));
            Rational m1 = exact_value(x.child(1));
            if (m0 + m1 != exact_value(x))
                throw MalformedMeasure("additivity violated at '" + x.str() + "'");
            return {m0, m1};
        }
        Rational q0 = measure_of(x.child(0), eps);
        Rational q1 = measure_of(x.child(1), eps);
        Rational qx = measure_of(x, eps);
        Rational gap = abs(q0 + q1 - qx);
        if (gap > 3 * eps)
            throw MalformedMeasure("additivity violated beyond tolerance at '" + x.str() + "'");
        return {q0, q1};
    }

    // Decides mu([xb]) > mu([x])/3 strictly. Exact kinds decide exactly;
    // the oracle refines along its schedule and raises precision-exhausted
    // rather than guessing an undecidable (tied) comparison.
    bool child_exceeds_third(const BitString& x, int b) const {
        if (exact()) {
            return 3 * exact_value(x.child(b)) > exact_value(x);
        }
        for (int i = 1; i <= oracle_budget_; ++i) {
            Rational eps = pow2(-i);
            Rational qc = oracle_answer(x.child(b), i);
            Rational qx = oracle_answer(x, i);
            if (3 * qc - qx > 4 * eps) return true;
            if (qx - 3 * qc > 4 * eps) return false;
        }
        throw PrecisionExhausted("comparison mu([" + x.str() + std::to_string(b) +
                                 "]) vs mu([" + x.str() + "])/3 undecided within stage budget");
    }

    // Follows the heavy branch and reports the decreasing chain mu(B_k);
    // flags a suspected atom when the chain ends at or above the threshold.
    NonatomicAudit nonatomic_audit(int depth, const Rational& threshold) const {
        if (depth < 1) throw std::domain_error("nonatomic_audit: depth must be >= 1");
        NonatomicAudit report;
        report.threshold = threshold;
        BitString x;
        for (int k = 0; k < depth; ++k) {
            int b = child_exceeds_third(x, 0) ? 0 : 1;
            x = x.child(b);
            report.mu_chain.push_back(measure_of(x, pow2(-(k + 8))));
        }
        report.branch = x;
        report.atom_suspected = report.mu_chain.back() >= threshold;
        return report;
    }

private:
    explicit Measure(MeasureKind k) : kind_(k) {}

    bool matches_point(const BitString& x) const {
        for (std::size_t i = 0; i < x.length(); ++i) {
            int expected = i < point_prefix_.length()
                               ? point_prefix_.bit(i)
                               : point_period_.bit((i - point_prefix_.length()) % point_period_.length());
            if (x.bit(i) != expected) return false;
        }
        return true;
    }

    int stage_for(const Rational& eps) const {
        for (int i = 1; i <= oracle_budget_; ++i)
            if (pow2(-i) <= eps) return i;
        throw PrecisionExhausted("requested eps below the stage budget resolution");
    }

    // Stage-i answer: exact value rounded down to the 2^-(i+1) grid, so the
    // result is a genuine eps_i-approximation that never leaks exactness.
    Rational oracle_answer(const BitString& x, int stage) const {
        Rational v = oracle_inner_->exact_value(x);
        Rational scaled = v * pow2(stage + 1);
        mpz_class flo;
        mpz_fdiv_q(flo.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        return Rational(flo) * pow2(-(stage + 1));
    }

    MeasureKind kind_;
    Rational p1_;
    BranchingWeights branching_;
    BitString point_prefix_;
    BitString point_period_;
    std::vector<Measure> parts_;
    std::vector<Rational> part_weights_;
    std::shared_ptr<const Measure> oracle_inner_;
    int oracle_budget_ = 0;
};

}  // namespace cantorlab
