#pragma once

#include <string>
#include <vector>

#include "cantorlab/basic_function.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/prefix_cover.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

// ===========================================================================
// Martin-Löf tests, materialized to a finite number of levels. Level n is a
// canonical interval union V_n; validity demands nesting and the exact
// measure bound mu(V_n) <= 2^-n.
// ===========================================================================

class MLTest {
public:
    MLTest() = default;

    static MLTest from_levels(std::vector<std::vector<Interval>> levels) {
        MLTest t;
        for (auto& level : levels) {
            std::vector<BitString> stems;
            stems.reserve(level.size());
            for (auto& iv : level) stems.push_back(std::move(iv.stem));
            t.levels_.push_back(PrefixCover::of(std::move(stems)));
        }
        return t;
    }

    int max_level() const { return static_cast<int>(levels_.size()); }

    const PrefixCover& level(int n) const { return levels_.at(n - 1); }

    // Exact per-level measures; asserts nesting and the 2^-n bound.
    std::vector<Rational> validate(const Measure& mu) const {
        std::vector<Rational> measures;
        for (int n = 1; n <= max_level(); ++n) {
            Rational m = levels_[n - 1].mu(mu);
            if (m > pow2(-n))
                throw InvalidTest("mu(V_n) = " + format_rational(m) + " exceeds 2^-n", n);
            if (n > 1 && !levels_[n - 1].subset_of(levels_[n - 2]))
                throw InvalidTest("level not nested inside its predecessor", n);
            measures.push_back(std::move(m));
        }
        return measures;
    }

    // Largest k with [x] contained in V_k; 0 when x lies in no level.
    int deficiency(const BitString& x) const {
        for (int k = max_level(); k >= 1; --k)
            if (levels_[k - 1].covers(x)) return k;
        return 0;
    }

private:
    std::vector<PrefixCover> levels_;
};

// Lemma-1 diagonal union U_n = V^1_{n+1} ∪ V^2_{n+2} ∪ ...; the mixed test
// loses exactly j levels against member j.
inline MLTest universal_mix(const std::vector<MLTest>& tests, const Measure& mu) {
    for (const auto& t : tests) t.validate(mu);
    int out_levels = 0;
    for (std::size_t j = 0; j < tests.size(); ++j)
        out_levels = std::max(out_levels, tests[j].max_level() - static_cast<int>(j) - 1);
    std::vector<std::vector<Interval>> levels(out_levels);
    for (int n = 1; n <= out_levels; ++n)
        for (std::size_t j = 0; j < tests.size(); ++j) {
            int source = n + static_cast<int>(j) + 1;
            if (source > tests[j].max_level()) continue;
            for (const auto& stem : tests[j].level(source).stems())
                levels[n - 1].push_back(Interval{stem});
        }
    MLTest mixed = MLTest::from_levels(std::move(levels));
    mixed.validate(mu);
    return mixed;
}

// ===========================================================================
// Probability-bounded step functions. For a basic function the condition
// mu{t > c} <= 1/c for all rational c is equivalent to v * mu{t >= v} <= 1 at
// every positive level value v, which is decidable exactly.
// ===========================================================================

struct PbCheckRow {
    Rational level_value;
    Rational mu_at_least;
    bool pass;
};

inline std::vector<PbCheckRow> probability_bound_rows(const BasicFunction& t, const Measure& mu) {
    std::vector<PbCheckRow> rows;
    for (const auto& v : t.positive_values()) {
        Rational m = t.mu_superlevel_ge(v, mu);
        rows.push_back({v, m, v * m <= 1});
    }
    return rows;
}

inline void require_probability_bounded(const BasicFunction& t, const Measure& mu) {
    for (const auto& row : probability_bound_rows(t, mu))
        if (!row.pass)
            throw NotProbabilityBounded(
                "mu{t >= " + format_rational(row.level_value) + "} = " + format_rational(row.mu_at_least),
                format_rational(row.level_value));
}

// Level-set test V_n = {t > 2^n} from the final materialized stage. Every
// stage must already be probability bounded.
inline MLTest pb_from_function(const StagedEnumeration& t, const Measure& mu) {
    for (std::size_t i = 0; i < t.size(); ++i) require_probability_bounded(t.stage(i), mu);
    const BasicFunction& top = t.final_stage();
    int n_max = 0;
    {
        Rational v = top.max_value();
        while (pow2(n_max + 1) < v) ++n_max;  // V_n nonempty iff 2^n < max value
    }
    std::vector<std::vector<Interval>> levels(n_max);
    for (int n = 1; n <= n_max; ++n)
        for (const auto& stem : top.superlevel_strict(pow2(n)))
            levels[n - 1].push_back(Interval{stem});
    MLTest test = MLTest::from_levels(std::move(levels));
    test.validate(mu);
    return test;
}

// The expectation-bounded mixture: candidate n is frozen at its last stage
// whose integral is still <= 1, then the frozen stages are summed with
// weights 2^-n. The result is expectation bounded by construction.
inline StagedEnumeration eb_mix(const std::vector<StagedEnumeration>& candidates,
                                const Measure& mu) {
    std::size_t max_stages = 1;
    std::vector<std::size_t> frozen;  // last usable stage index + 1 (0: contribute nothing)
    for (const auto& cand : candidates) {
        for (std::size_t i = 0; i < cand.size(); ++i) require_probability_bounded(cand.stage(i), mu);
        std::size_t usable = 0;
        while (usable < cand.size() && cand.stage(usable).integrate(mu) <= 1) ++usable;
        frozen.push_back(usable);
        max_stages = std::max(max_stages, cand.size());
    }
    std::vector<BasicFunction> stages;
    for (std::size_t s = 0; s < max_stages; ++s) {
        BasicFunction mix = BasicFunction::zero();
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            std::size_t use = std::min(s + 1, frozen[j]);
            if (use == 0) continue;
            mix = pointwise_sum(mix, candidates[j].stage(use - 1).scale(pow2(-(long)(j + 1))));
        }
        stages.push_back(std::move(mix));
    }
    StagedEnumeration out = StagedEnumeration::from_stages(std::move(stages));
    if (out.final_stage().integrate(mu) > 1)
        throw std::logic_error("eb_mix produced integral above 1");  // clipping forbids this
    return out;
}

}  // namespace cantorlab
