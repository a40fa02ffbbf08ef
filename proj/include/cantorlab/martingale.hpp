#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cantorlab/errors.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/rational.hpp"
#include "cantorlab/semimeasure.hpp"

namespace cantorlab {

enum class TreeKind { martingale, supermartingale, submartingale, unclassified };

inline const char* to_string(TreeKind k) {
    switch (k) {
        case TreeKind::martingale: return "martingale";
        case TreeKind::supermartingale: return "supermartingale";
        case TreeKind::submartingale: return "submartingale";
        default: return "unclassified";
    }
}

// ===========================================================================
// Capital functions on the finite prefix tree. Absent nodes carry 0. The
// node law at x compares mu([x])M(x) with mu([x0])M(x0) + mu([x1])M(x1);
// equality everywhere is a martingale, >= a supermartingale, <= a
// submartingale.
// ===========================================================================

class TreeFunction {
public:
    struct Classification {
        TreeKind kind = TreeKind::unclassified;
        Rational worst_slack;  // signed slack of largest magnitude
        BitString worst_node;
    };

    TreeFunction() : depth_(0) {}

    static TreeFunction from_entries(std::map<BitString, Rational> values, int depth) {
        TreeFunction f;
        for (auto it = values.begin(); it != values.end();) {
            if (sgn(it->second) < 0)
                throw std::invalid_argument("invalid capital function: negative value at '" +
                                            it->first.str() + "'");
            if (static_cast<int>(it->first.length()) > depth)
                throw std::invalid_argument("tree value deeper than the declared depth at '" +
                                            it->first.str() + "'");
            it = sgn(it->second) == 0 ? values.erase(it) : std::next(it);
        }
        f.values_ = std::move(values);
        f.depth_ = depth;
        return f;
    }

    int depth() const { return depth_; }
    const std::map<BitString, Rational>& entries() const { return values_; }

    Rational value(const BitString& x) const {
        auto it = values_.find(x);
        return it == values_.end() ? Rational(0) : it->second;
    }

    // Is x a key or an ancestor of a key?
    bool in_closure(const BitString& x) const {
        auto it = values_.lower_bound(x);
        return it != values_.end() && x.is_prefix_of(it->first);
    }

    // Exact node checks over the support closure; absent nodes are 0 and can
    // only relax the inequalities, so the closure decides the kind.
    Classification classify(const Measure& mu) const {
        Classification result;
        bool all_ge = true, all_le = true;
        Rational worst = 0;
        BitString worst_node;
        auto consider = [&](const BitString& x) {
            if (static_cast<int>(x.length()) >= depth_) return;
            Rational slack = mu.exact_value(x) * value(x) -
                             mu.exact_value(x.child(0)) * value(x.child(0)) -
                             mu.exact_value(x.child(1)) * value(x.child(1));
            if (sgn(slack) > 0) all_le = false;
            if (sgn(slack) < 0) all_ge = false;
            if (abs(slack) > abs(worst)) {
                worst = slack;
                worst_node = x;
            }
        };
        for (const auto& [stem, v] : values_) {
            consider(stem);
            if (!stem.empty()) consider(stem.parent());
        }
        result.worst_slack = worst;
        result.worst_node = worst_node;
        if (all_ge && all_le) result.kind = TreeKind::martingale;
        else if (all_ge) result.kind = TreeKind::supermartingale;
        else if (all_le) result.kind = TreeKind::submartingale;
        else result.kind = TreeKind::unclassified;
        return result;
    }

    bool is_supermartingale(const Measure& mu) const {
        TreeKind k = classify(mu).kind;
        return k == TreeKind::martingale || k == TreeKind::supermartingale;
    }

private:
    std::map<BitString, Rational> values_;
    int depth_;
};

// M = a / mu, the universal supermartingale of the supplied semimeasure.
inline TreeFunction universal_from_semimeasure(const ContinuousSemimeasure& a, const Measure& mu) {
    std::map<BitString, Rational> values;
    for (const auto& [stem, w] : a.entries()) {
        Rational m = mu.exact_value(stem);
        if (sgn(m) == 0) throw ZeroMeasureSupport(stem.str());
        values[stem] = w / m;
    }
    return TreeFunction::from_entries(std::move(values), a.depth());
}

struct WinResult {
    bool wins = false;
    BitString argmax;  // earliest maximizing prefix (ties -> shortest)
    Rational max_value;
};

inline WinResult wins_check(const TreeFunction& m, const BitString& path,
                            const Rational& threshold) {
    WinResult r;
    r.max_value = m.value(BitString());
    for (std::size_t n = 1; n <= path.length(); ++n) {
        BitString w = path.prefix(n);
        Rational v = m.value(w);
        if (v > r.max_value) {
            r.max_value = v;
            r.argmax = w;
        }
    }
    r.wins = r.max_value >= threshold;
    return r;
}

// ===========================================================================
// Doob crossings. Along each branch the construction is a two-mode state
// machine: capital is frozen until M falls strictly below alpha, then it is
// bet proportionally to M (mirroring) until M exceeds beta strictly, where
// the capital is saved again. Each completed upcross multiplies the saved
// capital by more than beta/alpha.
// ===========================================================================

struct CrossingParams {
    Rational alpha;
    Rational beta;
};

struct UpcrossSegment {
    BitString entry;   // activation node (M < alpha there)
    BitString freeze;  // first extension with M > beta
    Rational entry_capital;
    Rational frozen_capital;
};

struct DoobResult {
    TreeFunction crossed;
    std::vector<UpcrossSegment> upcrosses;
};

inline DoobResult doob_crossing_build(const TreeFunction& m, const CrossingParams& p,
                                      const Measure& mu, const Rational& initial_capital = 1) {
    if (!(0 < p.alpha && p.alpha < p.beta))
        throw std::domain_error("crossing parameters need 0 < alpha < beta");
    if (!m.is_supermartingale(mu))
        throw std::invalid_argument("doob_crossing_build needs a supermartingale");

    DoobResult result;
    std::map<BitString, Rational> out;

    struct Frame {
        BitString stem;
        bool active;
        Rational capital;      // entry capital of the current active segment, or frozen capital
        Rational entry_value;  // M at activation (positive), meaningful when active
        BitString entry_stem;
    };
    std::vector<Frame> stack{{BitString(), false, initial_capital, Rational(1), BitString()}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (!m.in_closure(f.stem)) continue;
        Rational v = m.value(f.stem);
        if (!f.active) {
            if (sgn(v) > 0 && v < p.alpha) {  // strictly below alpha: start betting
                f.active = true;
                f.entry_value = v;
                f.entry_stem = f.stem;
            }
            out[f.stem] = f.capital;
        } else {
            Rational mirrored = f.capital * v / f.entry_value;
            out[f.stem] = mirrored;
            if (v > p.beta) {  // strictly above beta: save the capital
                result.upcrosses.push_back({f.entry_stem, f.stem, f.capital, mirrored});
                f.active = false;
                f.capital = mirrored;
                // a saved node cannot re-activate at itself (beta > alpha)
            }
        }
        if (static_cast<int>(f.stem.length()) < m.depth()) {
            Frame c1 = f;
            c1.stem = f.stem.child(1);
            stack.push_back(std::move(c1));
            Frame c0 = std::move(f);
            c0.stem = c0.stem.child(0);
            stack.push_back(std::move(c0));
        }
    }
    result.crossed = TreeFunction::from_entries(std::move(out), m.depth());
    return result;
}

// ===========================================================================
// The Fatou estimate: integral of the windowed minimum of M along prefixes,
// computed exactly as a sum over the depth-N cells that stay inside the
// support closure (all other cells hit a zero value inside the window).
// ===========================================================================

struct FatouEstimate {
    Rational integral;                                // ∫ min_{n in [n0,N]} M(w_1..n) dmu
    std::vector<std::pair<int, Rational>> level_sums; // n -> sum_{|x|=n} M(x) mu([x])
    Rational min_level_sum;
    bool fatou_ok = false;       // integral <= min level sum
    bool within_one = false;     // min level sum <= 1 (holds for a-derived M)
};

inline FatouEstimate fatou_estimate(const TreeFunction& m, const Measure& mu, int n0, int N) {
    if (n0 < 0 || n0 > N || N > m.depth())
        throw std::domain_error("fatou window outside the materialized depth");
    FatouEstimate est;
    est.integral = 0;

    struct Frame {
        BitString stem;
        Rational running_min;
        bool min_started;
    };
    std::vector<Frame> stack{{BitString(), Rational(0), false}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (!m.in_closure(f.stem)) continue;  // min hits 0 inside the window
        int d = static_cast<int>(f.stem.length());
        if (d >= n0) {
            Rational v = m.value(f.stem);
            if (!f.min_started || v < f.running_min) f.running_min = v;
            f.min_started = true;
        }
        if (d == N) {
            est.integral += mu.exact_value(f.stem) * f.running_min;
            continue;
        }
        Frame c1 = f;
        c1.stem = f.stem.child(1);
        stack.push_back(std::move(c1));
        Frame c0 = std::move(f);
        c0.stem = c0.stem.child(0);
        stack.push_back(std::move(c0));
    }

    for (int n = n0; n <= N; ++n) {
        Rational s = 0;
        for (const auto& [stem, v] : m.entries())
            if (static_cast<int>(stem.length()) == n) s += v * mu.exact_value(stem);
        est.level_sums.emplace_back(n, s);
        if (n == n0 || s < est.min_level_sum) est.min_level_sum = s;
    }
    est.fatou_ok = est.integral <= est.min_level_sum;
    est.within_one = est.min_level_sum <= 1;
    return est;
}

}  // namespace cantorlab
