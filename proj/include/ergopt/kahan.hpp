#pragma once

namespace ergopt {

/// Kahan-compensated accumulator for long orbit sums.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double value) {
        double y = value - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    KahanSum& operator+=(double value) {
        add(value);
        return *this;
    }
    operator double() const { return sum; }
};

} // namespace ergopt
