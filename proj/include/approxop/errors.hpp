#pragma once

#include <stdexcept>
#include <string>

namespace approxop {

/// Requested evaluation is possible in principle but exceeds the configured
/// budget (e.g. full enumeration of (n+1)^n terms).
class FeasibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested strategy does not apply to the given function/family combination.
class StrategyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical evaluation failed to meet its tolerance; carries the partial result.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}

    double partial_result() const { return partial_; }

private:
    double partial_;
};

}  // namespace approxop
