#pragma once

#include <stdexcept>
#include <string>

namespace cantorlab {

// Raised when an approximation-oracle measure cannot decide a comparison
// (or reach a requested tolerance) within its stage budget.
class PrecisionExhausted : public std::runtime_error {
public:
    explicit PrecisionExhausted(const std::string& what)
        : std::runtime_error("precision exhausted: " + what) {}
};

// Raised when certified enclosures stay too wide to decide a strict
// comparison even at the precision cap.
class EnclosureTooWide : public std::runtime_error {
public:
    explicit EnclosureTooWide(const std::string& what)
        : std::runtime_error("enclosure too wide: " + what) {}
};

class MalformedMeasure : public std::runtime_error {
public:
    explicit MalformedMeasure(const std::string& what)
        : std::runtime_error("malformed measure: " + what) {}
};

class InvalidSemimeasure : public std::runtime_error {
public:
    InvalidSemimeasure(const std::string& what, std::string stem)
        : std::runtime_error("invalid semimeasure at '" + stem + "': " + what),
          offending_stem(std::move(stem)) {}
    std::string offending_stem;
};

class InvalidTest : public std::runtime_error {
public:
    InvalidTest(const std::string& what, int level)
        : std::runtime_error("invalid test at level " + std::to_string(level) + ": " + what),
          offending_level(level) {}
    int offending_level;
};

class UndeterminedPrefix : public std::runtime_error {
public:
    explicit UndeterminedPrefix(const std::string& stem)
        : std::runtime_error("value undetermined: '" + stem +
                             "' is shorter than a covering stem") {}
};

class NotProbabilityBounded : public std::runtime_error {
public:
    NotProbabilityBounded(const std::string& what, std::string witness)
        : std::runtime_error("not probability bounded (witness c = " + witness + "): " + what),
          witness_level(std::move(witness)) {}
    std::string witness_level;
};

// A construction needed mu([x]) > 0 on a supported stem and found 0.
class ZeroMeasureSupport : public std::runtime_error {
public:
    explicit ZeroMeasureSupport(const std::string& stem)
        : std::runtime_error("division by zero measure at supported stem '" + stem + "'") {}
};

class DepthBudgetExhausted : public std::runtime_error {
public:
    explicit DepthBudgetExhausted(const std::string& what)
        : std::runtime_error("depth budget exhausted: " + what) {}
};

// File-format errors carry a 1-based line and column where known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line, long column)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + what),
          line(line), column(column) {}
    long line;
    long column;
};

}  // namespace cantorlab
