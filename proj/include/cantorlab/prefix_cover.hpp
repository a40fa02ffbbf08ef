#pragma once

#include <algorithm>
#include <vector>

#include "cantorlab/bitstring.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/rational.hpp"

namespace cantorlab {

// A finite union of intervals in canonical form: stems are prefix-free,
// sorted, and sibling pairs are merged, so a fully covered subtree is always
// represented by its root stem. That makes `covers` a single ancestor lookup.
class PrefixCover {
public:
    PrefixCover() = default;

    static PrefixCover of(std::vector<BitString> stems) {
        std::sort(stems.begin(), stems.end());
        stems.erase(std::unique(stems.begin(), stems.end()), stems.end());
        // drop stems covered by an earlier (shorter) one
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<BitString> kept;
            kept.reserve(stems.size());
            for (const auto& s : stems) {
                if (!kept.empty() && kept.back().is_prefix_of(s)) {
                    changed = true;  // covered by ancestor
                    continue;
                }
                kept.push_back(s);
            }
            // merge adjacent sibling pairs
            std::vector<BitString> merged;
            merged.reserve(kept.size());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                if (i + 1 < kept.size() && !kept[i].empty() && !kept[i + 1].empty() &&
                    kept[i].bit(kept[i].length() - 1) == 0 && kept[i].sibling() == kept[i + 1]) {
                    merged.push_back(kept[i].parent());
                    ++i;
                    changed = true;
                } else {
                    merged.push_back(kept[i]);
                }
            }
            std::sort(merged.begin(), merged.end());
            stems = std::move(merged);
        }
        PrefixCover c;
        c.stems_ = std::move(stems);
        return c;
    }

    bool empty() const { return stems_.empty(); }
    const std::vector<BitString>& stems() const { return stems_; }

    // [x] subseteq union, decided on the canonical form.
    bool covers(const BitString& x) const {
        auto it = std::upper_bound(stems_.begin(), stems_.end(), x);
        if (it != stems_.begin()) {
            --it;
            if (it->is_prefix_of(x)) return true;
        }
        return false;
    }

    // Does the union meet [x] at all?
    bool intersects(const BitString& x) const {
        if (covers(x)) return true;
        auto it = std::upper_bound(stems_.begin(), stems_.end(), x);
        return it != stems_.end() && x.is_prefix_of(*it);
    }

    bool subset_of(const PrefixCover& other) const {
        return std::all_of(stems_.begin(), stems_.end(),
                           [&](const BitString& s) { return other.covers(s); });
    }

    Rational mu(const Measure& measure) const {
        Rational total = 0;
        for (const auto& s : stems_) total += measure.exact_value(s);
        return total;
    }

private:
    std::vector<BitString> stems_;
};

}  // namespace cantorlab
