#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

#include "cantorlab/errors.hpp"

namespace cantorlab {

// A finite binary string. The empty string denotes the root of the prefix
// tree (equivalently, the whole space under the interval reading).
class BitString {
public:
    BitString() = default;

    static BitString parse(std::string_view text, long line = 0, long column = 0) {
        BitString x;
        x.bits_.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1')
                throw ParseError(std::string("expected bit string, got '") + std::string(text) + "'",
                                 line, column);
            x.bits_.push_back(c);
        }
        return x;
    }

    // n copies of bit b.
    static BitString repeated(int b, std::size_t n) {
        BitString x;
        x.bits_.assign(n, b ? '1' : '0');
        return x;
    }

    std::size_t length() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    int bit(std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }

    BitString child(int b) const {
        BitString x = *this;
        x.bits_.push_back(b ? '1' : '0');
        return x;
    }

    BitString parent() const {
        BitString x = *this;
        x.bits_.pop_back();
        return x;
    }

    // Flips the last bit.
    BitString sibling() const {
        BitString x = *this;
        x.bits_.back() = (x.bits_.back() == '0') ? '1' : '0';
        return x;
    }

    BitString prefix(std::size_t n) const {
        BitString x;
        x.bits_ = bits_.substr(0, n);
        return x;
    }

    BitString concat(const BitString& other) const {
        BitString x = *this;
        x.bits_ += other.bits_;
        return x;
    }

    // y.is_prefix_of(x) decides y ⪯ x.
    bool is_prefix_of(const BitString& x) const {
        return bits_.size() <= x.bits_.size() &&
               x.bits_.compare(0, bits_.size(), bits_) == 0;
    }

    bool is_strict_prefix_of(const BitString& x) const {
        return bits_.size() < x.bits_.size() && is_prefix_of(x);
    }

    bool comparable_with(const BitString& x) const {
        return is_prefix_of(x) || x.is_prefix_of(*this);
    }

    const std::string& str() const { return bits_; }

    auto operator<=>(const BitString&) const = default;

private:
    std::string bits_;  // '0'/'1' only
};

// The interval [x]: all infinite extensions of the stem.
struct Interval {
    BitString stem;

    bool contains(const Interval& other) const { return stem.is_prefix_of(other.stem); }
    auto operator<=>(const Interval&) const = default;
};

}  // namespace cantorlab
