#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gfaccess {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A codebook failed one of its structural checks. `witness` holds the
/// offending pattern indices (pair check) or the slot index (coverage check).
class InvariantViolation : public Error {
public:
    enum class Kind { PatternSize, SlotRange, SlotOrder, PatternCount, PairIntersection, SlotCoverage };

    InvariantViolation(Kind kind, std::vector<long long> witness, const std::string& what)
        : Error(what), kind_(kind), witness_(std::move(witness)) {}

    Kind kind() const { return kind_; }
    const std::vector<long long>& witness() const { return witness_; }

private:
    Kind kind_;
    std::vector<long long> witness_;
};

class UnsupportedM : public Error {
public:
    using Error::Error;
};

class NonIntegralDesign : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class InsufficientPilots : public Error {
public:
    using Error::Error;
};

class UTooLarge : public Error {
public:
    using Error::Error;
};

class RandomLawUnsupported : public Error {
public:
    using Error::Error;
};

class DegenerateConditioning : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Raised by the gamma fit when the descent cannot produce a usable iterate;
/// carries the best parameters seen.
class OptimizerFailed : public Error {
public:
    OptimizerFailed(const std::string& what, double best_shape, double best_scale)
        : Error(what), best_shape_(best_shape), best_scale_(best_scale) {}
    double best_shape() const { return best_shape_; }
    double best_scale() const { return best_scale_; }

private:
    double best_shape_;
    double best_scale_;
};

class NoCrossover : public Error {
public:
    using Error::Error;
};

}  // namespace gfaccess
