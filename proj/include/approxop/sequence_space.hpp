#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "approxop/interval.hpp"

namespace approxop {

/// Analytic description of all coordinates past the explicit head.
/// Geometric: t_{m+k} = c * r^k for k >= 1, where m is the head length.
struct Tail {
    enum class Kind { Zero, Geometric };

    Kind kind = Kind::Zero;
    double c = 0.0;
    double r = 0.0;

    static Tail zero() { return {}; }
    static Tail geometric(double c, double r) { return {Kind::Geometric, c, r}; }

    bool is_zero() const { return kind == Kind::Zero || c == 0.0; }
};

/// Which ambient set a point lives in. Gamma and the cube fix the coordinate
/// range to [0,1]; FamilyDomain carries the interval of a 1-D operator family
/// (also used for unconstrained coefficient sequences via the real line).
struct Space {
    enum class Kind { HilbertGamma, CubeInfty, FamilyDomain };

    Kind kind = Kind::HilbertGamma;
    Interval interval = Interval::unit();

    static Space gamma() { return {Kind::HilbertGamma, Interval::unit()}; }
    static Space cube() { return {Kind::CubeInfty, Interval::unit()}; }
    static Space family_domain(Interval dom) { return {Kind::FamilyDomain, dom}; }

    friend bool operator==(const Space& a, const Space& b) {
        return a.kind == b.kind && a.interval == b.interval;
    }
};

/// A point of l^2 (or of the infinite cube): finitely many explicit
/// coordinates followed by an analytic tail. All derived quantities
/// (coordinates, tail sums, norms, inner products) are exact closed forms,
/// never truncations. Immutable after construction.
class SequencePoint {
public:
    SequencePoint() = default;  // the zero point of Gamma

    /// Validates coordinates against the space and the tail against l^2
    /// membership (|r| < 1); throws std::domain_error on violation.
    static SequencePoint make(Space space, std::vector<double> head, Tail tail = Tail::zero());

    static SequencePoint gamma(std::vector<double> head, Tail tail = Tail::zero()) {
        return make(Space::gamma(), std::move(head), tail);
    }
    static SequencePoint cube(std::vector<double> head, Tail tail = Tail::zero()) {
        return make(Space::cube(), std::move(head), tail);
    }
    /// Unconstrained square-summable coefficient sequence (used for linear
    /// functionals).
    static SequencePoint coeffs(std::vector<double> head, Tail tail = Tail::zero()) {
        return make(Space::family_domain(Interval::real_line()), std::move(head), tail);
    }
    static SequencePoint in_domain(Interval dom, std::vector<double> head,
                                   Tail tail = Tail::zero()) {
        return make(Space::family_domain(dom), std::move(head), tail);
    }

    /// j-th coordinate, 1-based; exact for any index.
    double coord(std::size_t j) const;

    /// Sum of squared coordinates past index n:  sum_{j>n} t_j^2.
    double tail_sq(std::size_t n) const;

    double norm_sq() const { return tail_sq(0); }

    std::size_t head_size() const { return head_.size(); }
    std::span<const double> head() const { return head_; }
    const Tail& tail() const { return tail_; }
    const Space& space() const { return space_; }

    bool is_zero() const;

    /// Copy with coordinate j replaced (head is materialized up to j if the
    /// index falls in the tail region). The new value is validated.
    SequencePoint with_coord(std::size_t j, double value) const;

    /// Calls fn(j, t_j) for every j = 1..n (zero-tail coordinates included)
    /// with incremental tail powers; the workhorse of closed-form operator
    /// evaluations.
    template <class Fn>
    void for_each_coord(std::size_t n, Fn&& fn) const {
        const std::size_t m = head_.size();
        for (std::size_t j = 1; j <= n && j <= m; ++j) fn(j, head_[j - 1]);
        if (n <= m) return;
        if (tail_.is_zero()) {
            for (std::size_t j = m + 1; j <= n; ++j) fn(j, 0.0);
            return;
        }
        double p = tail_.c;
        for (std::size_t j = m + 1; j <= n; ++j) {
            p *= tail_.r;
            fn(j, p);
        }
    }

private:
    std::vector<double> head_;
    Tail tail_;
    Space space_ = Space::gamma();
};

/// sum_{j>n} a_j b_j, exact (head terms plus geometric closed forms).
double inner_from(const SequencePoint& a, const SequencePoint& b, std::size_t n);

inline double inner(const SequencePoint& a, const SequencePoint& b) {
    return inner_from(a, b, 0);
}

/// sum_{j>n} (a_j - b_j)^2, exact.
double distance_sq_from(const SequencePoint& a, const SequencePoint& b, std::size_t n);

inline double distance_sq(const SequencePoint& a, const SequencePoint& b) {
    return distance_sq_from(a, b, 0);
}

/// l^2 distance. Throws std::domain_error if the points live in different
/// spaces.
double distance(const SequencePoint& a, const SequencePoint& b);

}  // namespace approxop
