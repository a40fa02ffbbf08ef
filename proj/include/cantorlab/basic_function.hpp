#pragma once

#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "cantorlab/bitstring.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/prefix_cover.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

// ===========================================================================
// Basic functions: finitely many prefix-free stems with rational values,
// default 0 outside the union. The value on any infinite sequence is decided
// by whichever stem it extends. Stored in canonical form (no zero pieces,
// equal-valued sibling pairs merged), so operator== is pointwise equality.
// ===========================================================================

class BasicFunction {
public:
    BasicFunction() = default;

    static BasicFunction zero() { return BasicFunction(); }

    static BasicFunction from_pieces(std::vector<std::pair<BitString, Rational>> raw) {
        std::map<BitString, Rational> pieces;
        for (auto& [stem, value] : raw) {
            if (!pieces.emplace(stem, value).second)
                throw std::invalid_argument("duplicate stem '" + stem.str() + "'");
        }
        // prefix-freeness: in sorted order a violation is always adjacent
        const BitString* prev = nullptr;
        for (const auto& [stem, value] : pieces) {
            if (prev && prev->is_prefix_of(stem))
                throw std::invalid_argument("stems not prefix-free: '" + prev->str() +
                                            "' covers '" + stem.str() + "'");
            prev = &stem;
        }
        BasicFunction f;
        f.pieces_ = std::move(pieces);
        f.canonicalize();
        return f;
    }

    static BasicFunction indicator_sum(const std::vector<BitString>& stems, const Rational& value) {
        PrefixCover cover = PrefixCover::of(stems);
        std::vector<std::pair<BitString, Rational>> pieces;
        for (const auto& s : cover.stems()) pieces.emplace_back(s, value);
        return from_pieces(std::move(pieces));
    }

    const std::map<BitString, Rational>& pieces() const { return pieces_; }
    bool is_zero() const { return pieces_.empty(); }

    // Value at [x]. Throws if x is shorter than a covering stem (the value is
    // not yet determined by this prefix).
    Rational eval(const BitString& x) const {
        auto it = pieces_.upper_bound(x);
        if (it != pieces_.begin()) {
            auto cand = std::prev(it);
            if (cand->first.is_prefix_of(x)) return cand->second;
        }
        if (it != pieces_.end() && x.is_strict_prefix_of(it->first))
            throw UndeterminedPrefix(x.str());
        return 0;
    }

    // Exact integral against an exact measure.
    Rational integrate(const Measure& mu) const {
        Rational total = 0;
        for (const auto& [stem, value] : pieces_) total += value * mu.exact_value(stem);
        return total;
    }

    // Integral within eps for oracle measures (splits the tolerance over the
    // pieces weighted by |value|).
    Rational integrate(const Measure& mu, const Rational& eps) const {
        if (mu.exact()) return integrate(mu);
        if (pieces_.empty()) return 0;
        Rational total_abs = 0;
        for (const auto& [stem, value] : pieces_) total_abs += abs(value);
        if (sgn(total_abs) == 0) return 0;
        Rational per = eps / total_abs;
        Rational total = 0;
        for (const auto& [stem, value] : pieces_) total += value * mu.measure_of(stem, per);
        return total;
    }

    BasicFunction scale(const Rational& factor) const {
        BasicFunction f;
        if (sgn(factor) != 0)
            for (const auto& [stem, value] : pieces_) f.pieces_[stem] = value * factor;
        f.canonicalize();
        return f;
    }

    // Stems where the value exceeds c strictly (a superlevel set).
    std::vector<BitString> superlevel_strict(const Rational& c) const {
        std::vector<BitString> out;
        for (const auto& [stem, value] : pieces_)
            if (value > c) out.push_back(stem);
        return out;
    }

    Rational mu_superlevel_strict(const Rational& c, const Measure& mu) const {
        Rational total = 0;
        for (const auto& [stem, value] : pieces_)
            if (value > c) total += mu.exact_value(stem);
        return total;
    }

    Rational mu_superlevel_ge(const Rational& c, const Measure& mu) const {
        Rational total = 0;
        for (const auto& [stem, value] : pieces_)
            if (value >= c) total += mu.exact_value(stem);
        return total;
    }

    // Ascending distinct positive values.
    std::vector<Rational> positive_values() const {
        std::set<Rational> vals;
        for (const auto& [stem, value] : pieces_)
            if (sgn(value) > 0) vals.insert(value);
        return {vals.begin(), vals.end()};
    }

    Rational max_value() const {
        Rational m = 0;
        for (const auto& [stem, value] : pieces_) m = std::max(m, value);
        return m;
    }

    bool operator==(const BasicFunction&) const = default;

    // Pointwise combination on the common prefix-free refinement.
    static BasicFunction combine(const BasicFunction& a, const BasicFunction& b,
                                 const std::function<Rational(const Rational&, const Rational&)>& op) {
        std::set<BitString> stems;
        for (const auto& [stem, value] : a.pieces_) stems.insert(stem);
        for (const auto& [stem, value] : b.pieces_) stems.insert(stem);
        BasicFunction out;
        refine(BitString(), stems, a, b, Rational(0), Rational(0), op, out.pieces_);
        out.canonicalize();
        return out;
    }

    bool dominates(const BasicFunction& other) const {
        bool ok = true;
        combine(*this, other, [&](const Rational& va, const Rational& vb) {
            if (va < vb) ok = false;
            return Rational(0);
        });
        return ok;
    }

private:
    void canonicalize() {
        for (auto it = pieces_.begin(); it != pieces_.end();)
            it = sgn(it->second) == 0 ? pieces_.erase(it) : std::next(it);
        // merge equal-valued sibling pairs until stable
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = pieces_.begin(); it != pieces_.end(); ++it) {
                const BitString& s = it->first;
                if (s.empty() || s.bit(s.length() - 1) != 0) continue;
                auto sib = pieces_.find(s.sibling());
                if (sib != pieces_.end() && sib->second == it->second) {
                    Rational v = it->second;
                    BitString parent = s.parent();
                    pieces_.erase(sib);
                    pieces_.erase(it);
                    pieces_[parent] = v;
                    changed = true;
                    break;
                }
            }
        }
    }

    // Descends the union trie of stems; emits one piece per refinement cell.
    static void refine(const BitString& x, const std::set<BitString>& stems,
                       const BasicFunction& a, const BasicFunction& b,
                       Rational va, Rational vb,
                       const std::function<Rational(const Rational&, const Rational&)>& op,
                       std::map<BitString, Rational>& out) {
        if (auto it = a.pieces_.find(x); it != a.pieces_.end()) va = it->second;
        if (auto it = b.pieces_.find(x); it != b.pieces_.end()) vb = it->second;
        auto it = stems.upper_bound(x);
        bool has_extension = it != stems.end() && x.is_strict_prefix_of(*it);
        if (!has_extension) {
            Rational v = op(va, vb);
            if (sgn(v) != 0) out[x] = v;
            return;
        }
        refine(x.child(0), stems, a, b, va, vb, op, out);
        refine(x.child(1), stems, a, b, va, vb, op, out);
    }

    std::map<BitString, Rational> pieces_;
};

inline BasicFunction pointwise_max(const BasicFunction& a, const BasicFunction& b) {
    return BasicFunction::combine(a, b,
                                  [](const Rational& x, const Rational& y) { return std::max(x, y); });
}

inline BasicFunction pointwise_sum(const BasicFunction& a, const BasicFunction& b) {
    return BasicFunction::combine(a, b,
                                  [](const Rational& x, const Rational& y) { return x + y; });
}

// ===========================================================================
// Staged enumerations: materialized increasing sequences of basic functions,
// the desk-scale stand-in for lower semicomputable functions.
// ===========================================================================

class StagedEnumeration {
public:
    static StagedEnumeration from_stages(std::vector<BasicFunction> stages) {
        for (std::size_t i = 1; i < stages.size(); ++i)
            if (!stages[i].dominates(stages[i - 1]))
                throw std::invalid_argument("malformed enumeration: stage " + std::to_string(i + 1) +
                                            " is not pointwise above stage " + std::to_string(i));
        StagedEnumeration e;
        e.stages_ = std::move(stages);
        return e;
    }

    std::size_t size() const { return stages_.size(); }
    const BasicFunction& stage(std::size_t i) const { return stages_.at(i); }
    const BasicFunction& final_stage() const { return stages_.back(); }
    bool empty() const { return stages_.empty() || final_stage().is_zero(); }

private:
    std::vector<BasicFunction> stages_;
};

// One threshold r together with the interval batches enumerated for
// {t > r}: enumerated[k] holds the intervals produced at step k+1.
struct ThresholdTrack {
    Rational r;
    std::vector<std::vector<Interval>> enumerated;
};

// Lemma-2 style materialization: stage k is the pointwise max over tracks of
// r * indicator(union of the first k batches).
inline StagedEnumeration enumeration_to_stages(const std::vector<ThresholdTrack>& tracks,
                                               std::size_t cutoff) {
    std::vector<BasicFunction> stages;
    for (std::size_t k = 1; k <= cutoff; ++k) {
        BasicFunction stage = BasicFunction::zero();
        for (const auto& track : tracks) {
            std::vector<BitString> stems;
            for (std::size_t i = 0; i < std::min(k, track.enumerated.size()); ++i)
                for (const auto& iv : track.enumerated[i]) stems.push_back(iv.stem);
            if (!stems.empty() && sgn(track.r) > 0)
                stage = pointwise_max(stage, BasicFunction::indicator_sum(stems, track.r));
        }
        stages.push_back(std::move(stage));
    }
    return StagedEnumeration::from_stages(std::move(stages));
}

}  // namespace cantorlab
