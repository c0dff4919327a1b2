#include "approxop/sequence_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "approxop/summation.hpp"

namespace approxop {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

// Every value c*r^k for k >= 1 must lie in the interval. With |r| < 1 the
// values shrink toward 0 monotonically in magnitude, so checking the first
// term and the sign pattern suffices.
void validate_tail(const Tail& tail, const Interval& dom) {
    if (tail.kind != Tail::Kind::Geometric) return;
    require(std::isfinite(tail.c) && std::isfinite(tail.r), "geometric tail parameters must be finite");
    require(std::abs(tail.r) < 1.0, "geometric tail requires |r| < 1");
    if (tail.c == 0.0 || tail.r == 0.0) return;
    if (tail.r > 0.0) {
        // all terms share the sign of c; magnitudes decrease from |c*r|
        require(dom.contains(tail.c * tail.r), "geometric tail leaves the coordinate domain");
        require(dom.contains(0.0), "coordinate domain must contain the tail limit 0");
    } else {
        // alternating signs: need both c*r and c*r^2 inside
        require(dom.contains(tail.c * tail.r) && dom.contains(tail.c * tail.r * tail.r),
                "alternating geometric tail leaves the coordinate domain");
    }
}

}  // namespace

SequencePoint SequencePoint::make(Space space, std::vector<double> head, Tail tail) {
    for (double x : head) {
        require(std::isfinite(x), "head coordinate must be finite");
        require(space.interval.contains(x), "head coordinate outside the space domain");
    }
    validate_tail(tail, space.interval);
    SequencePoint p;
    p.head_ = std::move(head);
    p.tail_ = tail;
    p.space_ = space;
    return p;
}

double SequencePoint::coord(std::size_t j) const {
    if (j == 0) throw std::domain_error("coordinates are 1-based");
    const std::size_t m = head_.size();
    if (j <= m) return head_[j - 1];
    if (tail_.is_zero()) return 0.0;
    return tail_.c * std::pow(tail_.r, static_cast<double>(j - m));
}

double SequencePoint::tail_sq(std::size_t n) const {
    // same arithmetic path as inner_from(t, t, n): guarantees that the
    // expansion ||t||^2 + ||t||^2 - 2<t,t> collapses to exactly zero
    return inner_from(*this, *this, n);
}

bool SequencePoint::is_zero() const {
    return tail_.is_zero() &&
           std::all_of(head_.begin(), head_.end(), [](double x) { return x == 0.0; });
}

SequencePoint SequencePoint::with_coord(std::size_t j, double value) const {
    if (j == 0) throw std::domain_error("coordinates are 1-based");
    std::vector<double> head(head_.begin(), head_.end());
    if (j > head.size()) {
        const std::size_t old = head.size();
        head.resize(j);
        for (std::size_t k = old + 1; k <= j; ++k) head[k - 1] = coord(k);
        // the analytic tail now starts at index j; re-anchor the geometric base
        Tail tail = tail_;
        if (tail.kind == Tail::Kind::Geometric)
            tail.c = tail_.c * std::pow(tail_.r, static_cast<double>(j - head_.size()));
        head[j - 1] = value;
        return make(space_, std::move(head), tail);
    }
    head[j - 1] = value;
    return make(space_, std::move(head), tail_);
}

double inner_from(const SequencePoint& a, const SequencePoint& b, std::size_t n) {
    const std::size_t M = std::max({n, a.head_size(), b.head_size()});
    NeumaierSum s;
    for (std::size_t j = n + 1; j <= M; ++j) s.add(a.coord(j) * b.coord(j));
    const Tail& ta = a.tail();
    const Tail& tb = b.tail();
    if (!ta.is_zero() && !tb.is_zero()) {
        // both in tail region beyond M: sum_{i>=1} (c_a r_a^{M-m_a+i})(c_b r_b^{M-m_b+i})
        const double fa = ta.c * std::pow(ta.r, static_cast<double>(M - a.head_size()));
        const double fb = tb.c * std::pow(tb.r, static_cast<double>(M - b.head_size()));
        const double q = ta.r * tb.r;
        s.add(fa * fb * q / (1.0 - q));
    }
    return s.value();
}

double distance_sq_from(const SequencePoint& a, const SequencePoint& b, std::size_t n) {
    if (a.tail().is_zero() && b.tail().is_zero()) {
        const std::size_t M = std::max(a.head_size(), b.head_size());
        NeumaierSum s;
        for (std::size_t j = n + 1; j <= M; ++j) {
            const double d = a.coord(j) - b.coord(j);
            s.add(d * d);
        }
        return s.value();
    }
    const double aa = a.tail_sq(n);
    const double bb = b.tail_sq(n);
    const double ab = inner_from(a, b, n);
    return std::max(0.0, aa + bb - 2.0 * ab);
}

double distance(const SequencePoint& a, const SequencePoint& b) {
    if (!(a.space() == b.space()))
        throw std::domain_error("distance requires points of the same space");
    return std::sqrt(distance_sq(a, b));
}

}  // namespace approxop
