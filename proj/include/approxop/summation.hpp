#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace approxop {

/// Neumaier compensated accumulator. Adding terms in a fixed order gives a
/// result accurate to ~1 ulp of the true sum regardless of term count.
class NeumaierSum {
public:
    NeumaierSum() = default;
    explicit NeumaierSum(double init) : sum_(init) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    NeumaierSum& operator+=(double x) {
        add(x);
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace approxop
