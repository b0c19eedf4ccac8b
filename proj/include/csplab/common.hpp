#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace csplab {

// Thrown for malformed inputs, bad parameters, broken file contents.
// The CLI maps this to exit code 2.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a requested computation would exceed a size cap
// (exhaustive enumeration limits, tree node budgets). CLI exit code 3.
struct size_cap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxArity = 24;  // exact 2^k tables only up to here

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// x*log(x) with the 0*log(0) = 0 convention used by every entropy here.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Neumaier compensated accumulator; keeps long expectation sums at ulp-level
// error, which the exact-constant checks rely on.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Binary entropy of a +/-1 magnetization, natural log:
//   H2(t) = -((1+t)/2)log((1+t)/2) - ((1-t)/2)log((1-t)/2)
inline double magnetization_entropy(double t) {
    return -xlogx((1.0 + t) / 2.0) - xlogx((1.0 - t) / 2.0);
}

// Node budget for tree sampling; overridable via CSPLAB_MAX_NODES.
inline std::uint64_t max_tree_nodes() {
    if (const char* s = std::getenv("CSPLAB_MAX_NODES")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
        throw validation_error("CSPLAB_MAX_NODES is not a positive integer");
    }
    return 10'000'000ull;
}

}  // namespace csplab
