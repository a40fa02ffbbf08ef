#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cantorlab/bitstring.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

// ===========================================================================
// Discrete semimeasures: nonnegative string masses with total <= 1. The
// surrogate for 2^-K(x) — masses are supplied, never derived from a
// universal machine.
// ===========================================================================

class DiscreteSemimeasure {
public:
    DiscreteSemimeasure() = default;

    static DiscreteSemimeasure from_entries(std::map<BitString, Rational> mass) {
        for (const auto& [stem, m] : mass)
            if (sgn(m) < 0) throw InvalidSemimeasure("negative mass", stem.str());
        DiscreteSemimeasure d;
        d.mass_ = std::move(mass);
        return d;
    }

    Rational mass(const BitString& x) const {
        auto it = mass_.find(x);
        return it == mass_.end() ? Rational(0) : it->second;
    }

    const std::map<BitString, Rational>& entries() const { return mass_; }

    // Total mass; rejects anything above 1.
    Rational validate() const {
        Rational total = 0;
        for (const auto& [stem, m] : mass_) total += m;
        if (total > 1)
            throw InvalidSemimeasure("total mass " + format_rational(total) + " exceeds 1", "");
        return total;
    }

private:
    std::map<BitString, Rational> mass_;
};

// ===========================================================================
// Continuous semimeasures on a finite tree: weight(x) >= weight(x0) +
// weight(x1) at every node, weight(root) <= 1; absent nodes carry 0. The
// surrogate for 2^-KA(x).
// ===========================================================================

class ContinuousSemimeasure {
public:
    struct Validation {
        Rational min_slack;
        BitString argmin;
    };

    ContinuousSemimeasure() : depth_(0) {}

    static ContinuousSemimeasure from_entries(std::map<BitString, Rational> weight, int depth) {
        ContinuousSemimeasure a;
        for (auto it = weight.begin(); it != weight.end();) {
            if (sgn(it->second) < 0) throw InvalidSemimeasure("negative weight", it->first.str());
            if (static_cast<int>(it->first.length()) > depth)
                throw InvalidSemimeasure("stem deeper than the declared depth", it->first.str());
            it = sgn(it->second) == 0 ? weight.erase(it) : std::next(it);
        }
        a.weight_ = std::move(weight);
        a.depth_ = depth;
        return a;
    }

    int depth() const { return depth_; }
    const std::map<BitString, Rational>& entries() const { return weight_; }

    Rational weight(const BitString& x) const {
        auto it = weight_.find(x);
        return it == weight_.end() ? Rational(0) : it->second;
    }

    // Checks the root bound and every node inequality; returns the worst
    // slack. Throws with the offending stem if any node fails.
    Validation validate() const {
        Validation v{Rational(1) - weight(BitString()), BitString()};
        if (sgn(v.min_slack) < 0)
            throw InvalidSemimeasure("root weight exceeds 1", "");
        auto consider = [&](const BitString& x) {
            Rational slack = weight(x) - weight(x.child(0)) - weight(x.child(1));
            if (slack < v.min_slack) v = {slack, x};
            if (sgn(slack) < 0)
                throw InvalidSemimeasure("children outweigh the node", x.str());
        };
        for (const auto& [stem, w] : weight_) {
            consider(stem);
            if (!stem.empty()) consider(stem.parent());  // catches mass created from nothing
        }
        return v;
    }

    Rational level_sum(int n) const {
        Rational total = 0;
        for (const auto& [stem, w] : weight_)
            if (static_cast<int>(stem.length()) == n) total += w;
        return total;
    }

    // Largest ratio weight/mu over the prefixes of x (exact).
    Rational best_prefix_ratio(const Measure& mu, const BitString& x) const;

private:
    std::map<BitString, Rational> weight_;
    int depth_;
};

// ===========================================================================
// Finite-state probabilistic emitters. Each state assigns rational
// probabilities to emitting 0 or 1 (the remainder is silent hanging);
// weight(x) is the probability the output begins with x.
// ===========================================================================

struct MachineState {
    Rational p0;
    Rational p1;
    std::string next0;
    std::string next1;
};

class MachineProgram {
public:
    static MachineProgram from_states(std::map<std::string, MachineState> states, std::string start) {
        for (const auto& [name, st] : states) {
            if (sgn(st.p0) < 0 || sgn(st.p1) < 0 || st.p0 + st.p1 > 1)
                throw std::invalid_argument("machine state '" + name +
                                            "': emission probabilities must be >= 0 and sum <= 1");
            if ((sgn(st.p0) > 0 && !states.count(st.next0)) ||
                (sgn(st.p1) > 0 && !states.count(st.next1)))
                throw std::invalid_argument("machine state '" + name + "' has a dangling transition");
        }
        if (!states.count(start)) throw std::invalid_argument("unknown start state '" + start + "'");
        MachineProgram p;
        p.states_ = std::move(states);
        p.start_ = std::move(start);
        return p;
    }

    const std::map<std::string, MachineState>& states() const { return states_; }
    const std::string& start() const { return start_; }

    // Materializes the output-prefix distribution to the given depth. The
    // node budget guards against dense trees blowing up memory.
    ContinuousSemimeasure to_semimeasure(int depth, std::size_t node_budget = (1u << 22)) const {
        std::map<BitString, Rational> weight;
        struct Item {
            BitString stem;
            const MachineState* state;
            Rational w;
        };
        std::vector<Item> stack{{BitString(), &states_.at(start_), Rational(1)}};
        while (!stack.empty()) {
            Item item = std::move(stack.back());
            stack.pop_back();
            weight[item.stem] = item.w;
            if (weight.size() > node_budget)
                throw DepthBudgetExhausted("machine materialization exceeded the node budget");
            if (static_cast<int>(item.stem.length()) == depth) continue;
            if (sgn(item.state->p1) > 0)
                stack.push_back({item.stem.child(1), &states_.at(item.state->next1),
                                 item.w * item.state->p1});
            if (sgn(item.state->p0) > 0)
                stack.push_back({item.stem.child(0), &states_.at(item.state->next0),
                                 item.w * item.state->p0});
        }
        return ContinuousSemimeasure::from_entries(std::move(weight), depth);
    }

private:
    std::map<std::string, MachineState> states_;
    std::string start_;
};

// A finite pool standing in for the universal mixture: weights play the role
// of the machine prior m(a_j).
struct MachinePool {
    std::vector<std::pair<ContinuousSemimeasure, Rational>> members;
};

inline ContinuousSemimeasure mix_pool(const MachinePool& pool) {
    Rational total_weight = 0;
    for (const auto& [a, w] : pool.members) {
        if (sgn(w) < 0) throw InvalidSemimeasure("negative pool weight", "");
        total_weight += w;
    }
    if (total_weight > 1)
        throw InvalidSemimeasure("pool weights sum to " + format_rational(total_weight) +
                                     " which exceeds 1",
                                 "");
    std::map<BitString, Rational> weight;
    int depth = 0;
    for (const auto& [a, w] : pool.members) {
        depth = std::max(depth, a.depth());
        if (sgn(w) == 0) continue;
        for (const auto& [stem, aw] : a.entries()) weight[stem] += w * aw;
    }
    auto mixed = ContinuousSemimeasure::from_entries(std::move(weight), depth);
    mixed.validate();
    return mixed;
}

// ===========================================================================
// The lift used to compare expectation-bounded and a-priori deficiencies:
// replays each discrete mass increment eps at x by adding eps on x and all
// its prefixes and eps * mu([y])/mu([x]) on every extension y down to
// `depth`. Cost is exponential in (depth - |x|); meant for shallow replays.
// ===========================================================================

inline ContinuousSemimeasure lift_discrete_to_continuous(
    const std::vector<DiscreteSemimeasure>& stages, const Measure& mu, int depth) {
    std::map<BitString, Rational> weight;
    DiscreteSemimeasure previous;
    auto apply_increment = [&](const BitString& x, const Rational& eps) {
        for (std::size_t n = 0; n <= x.length(); ++n) weight[x.prefix(n)] += eps;
        Rational mu_x = mu.exact_value(x);
        if (sgn(mu_x) == 0) throw ZeroMeasureSupport(x.str());
        // breadth-first over all strict extensions to the cutoff depth
        std::vector<BitString> frontier{x};
        while (!frontier.empty() && static_cast<int>(frontier.front().length()) < depth) {
            std::vector<BitString> next;
            for (const auto& y : frontier)
                for (int b : {0, 1}) {
                    BitString yb = y.child(b);
                    weight[yb] += eps * mu.exact_value(yb) / mu_x;
                    next.push_back(std::move(yb));
                }
            frontier = std::move(next);
        }
    };
    for (const auto& stage : stages) {
        for (const auto& [stem, m] : previous.entries())
            if (stage.mass(stem) < m)
                throw std::invalid_argument("discrete stages must increase pointwise (stem '" +
                                            stem.str() + "')");
        for (const auto& [stem, m] : stage.entries()) {
            Rational delta = m - previous.mass(stem);
            if (sgn(delta) < 0)
                throw std::invalid_argument("discrete stages must increase pointwise (stem '" +
                                            stem.str() + "')");
            if (sgn(delta) > 0) apply_increment(stem, delta);
        }
        previous = stage;
    }
    // drop exact zeros that the replay may have produced
    for (auto it = weight.begin(); it != weight.end();)
        it = sgn(it->second) == 0 ? weight.erase(it) : std::next(it);
    auto lifted = ContinuousSemimeasure::from_entries(std::move(weight), depth);
    lifted.validate();
    return lifted;
}

inline Rational ContinuousSemimeasure::best_prefix_ratio(const Measure& mu,
                                                         const BitString& x) const {
    Rational best = 0;
    for (std::size_t n = 0; n <= x.length(); ++n) {
        BitString w = x.prefix(n);
        Rational aw = weight(w);
        if (sgn(aw) == 0) continue;
        Rational mw = mu.exact_value(w);
        if (sgn(mw) == 0) throw ZeroMeasureSupport(w.str());
        best = std::max(best, Rational(aw / mw));
    }
    return best;
}

}  // namespace cantorlab
