#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace csplab {

// Plain sum-based accumulator. Merging two accumulators is exact-order
// addition of their sums, which keeps chunked parallel reductions
// deterministic for any worker count.
struct Accumulator {
    std::size_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const Accumulator& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = (sum_sq - static_cast<double>(n) * m * m) /
                   static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// Rejection threshold for the KS statistic at roughly the 3-sigma level
// (alpha ~ 0.0027 -> c(alpha) ~ 1.36..1.63; we use the conservative 1.63).
inline double ks_gate(std::size_t n, std::size_t m) {
    return 1.63 * std::sqrt(static_cast<double>(n + m) /
                            (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace csplab
