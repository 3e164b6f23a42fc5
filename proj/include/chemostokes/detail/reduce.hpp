#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace chemostokes::detail {

// The simd reductions below regroup floating-point operations; results are
// still deterministic for a given build. A NaN or Inf anywhere in the input
// poisons the result, because x * 0 is NaN exactly for non-finite x.

/// max |v_i|, or NaN if any entry is non-finite.
inline double max_abs(std::span<const double> v)
{
    const double* p = v.data();
    const std::size_t n = v.size();
    double m = 0.0;
    double poison = 0.0;
#pragma omp simd reduction(max : m) reduction(+ : poison)
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::abs(p[i]));
        poison += p[i] * 0.0;
    }
    return poison == 0.0 ? m : std::numeric_limits<double>::quiet_NaN();
}

struct MinMaxSum {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    [[nodiscard]] bool finite() const { return std::isfinite(sum) && std::isfinite(min) && std::isfinite(max); }
};

inline MinMaxSum min_max_sum(std::span<const double> v)
{
    const double* p = v.data();
    const std::size_t n = v.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double s = 0.0;
#pragma omp simd reduction(min : lo) reduction(max : hi) reduction(+ : s)
    for (std::size_t i = 0; i < n; ++i) {
        lo = std::min(lo, p[i]);
        hi = std::max(hi, p[i]);
        s += p[i];
    }
    return {lo, hi, s};
}

}  // namespace chemostokes::detail
