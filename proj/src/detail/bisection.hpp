#pragma once

#include <cmath>

namespace hctree::detail {

inline constexpr int kMaxBisectionIterations = 200;

struct BisectionResult {
    double root = 0.0;
    double value = 0.0;  // fn(root)
    int iterations = 0;
};

/// Bisection on [lo, hi] where fn(lo) and fn(hi) have opposite signs. Stops when the
/// midpoint no longer moves in double precision or after the iteration cap, and returns
/// whichever evaluated point has the smallest |fn|.
template <class Fn>
BisectionResult bisect(Fn&& fn, double lo, double hi) {
    double f_lo = fn(lo);
    double f_hi = fn(hi);
    BisectionResult best{lo, f_lo, 0};
    if (std::abs(f_hi) < std::abs(best.value)) {
        best = {hi, f_hi, 0};
    }
    const bool lo_positive = f_lo > 0.0;
    int it = 0;
    for (; it < kMaxBisectionIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double f_mid = fn(mid);
        if (std::abs(f_mid) < std::abs(best.value)) {
            best = {mid, f_mid, 0};
        }
        if (f_mid == 0.0) {
            break;
        }
        if ((f_mid > 0.0) == lo_positive) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    best.iterations = it;
    return best;
}

}  // namespace hctree::detail
