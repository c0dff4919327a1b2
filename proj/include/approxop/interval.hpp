#pragma once

#include <limits>

namespace approxop {

/// Closed real interval, possibly unbounded on either side.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    static constexpr double inf = std::numeric_limits<double>::infinity();

    static Interval unit() { return {0.0, 1.0}; }
    static Interval half_line() { return {0.0, inf}; }
    static Interval real_line() { return {-inf, inf}; }

    bool contains(double x) const { return lo <= x && x <= hi; }
    double diameter() const { return hi - lo; }
    bool bounded() const { return lo > -inf && hi < inf; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

}  // namespace approxop
