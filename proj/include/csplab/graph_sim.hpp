#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csplab/ensembles.hpp"

namespace csplab {

// Finite random instances: sampling, exhaustive solution counting, expected
// counts in closed form, overlap / joint-type statistics, and exact
// correlation-decay probes at enumeration scale.

struct FactorGraphInstance {
    int n = 0;
    double alpha = 0.0;
    struct Clause {
        std::int32_t dist_index = 0;
        std::vector<std::int32_t> vars;  // k indices in [0, n), repeats allowed
    };
    std::vector<Clause> clauses;
    std::vector<double> empirical_clause_freq;  // the L_n diagnostic

    static FactorGraphInstance from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct ColoringInstance {
    int n = 0;
    int q = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // distinct endpoints

    static ColoringInstance from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct SolutionStats {
    std::uint64_t z = 0;    // solution count
    std::uint64_t z_b = 0;  // balanced solutions, |x . 1| <= 1 (binary case)
    std::vector<double> mean_color_freq;          // coloring case, sums to 1
    std::vector<std::uint32_t> solutions;         // materialized when z <= 1e6
    bool solutions_materialized = false;
};

struct OverlapStats {
    bool satisfiable = false;
    std::size_t n_pairs = 0;
    // binary: overlap histogram over sampled/enumerated uniform solution pairs
    std::vector<std::pair<double, std::uint64_t>> overlap_histogram;
    double mean_overlap = 0.0;
    double se_overlap = 0.0;
    // coloring: joint-type deviations ||nu - flat||^2 of sampled pairs
    std::vector<double> type_dev_samples;
    double mean_type_dev = 0.0;        // sample mean
    double exact_mean_type_dev = 0.0;  // exact over all pairs, from agreement matrix
    double mean_row_marginal_dev = 0.0;
    double mean_col_marginal_dev = 0.0;
};

FactorGraphInstance sample_instance(const ClauseDistribution& dist, int n,
                                    double alpha, std::uint64_t seed);

ColoringInstance sample_coloring_instance(int n, int q, double alpha,
                                          std::uint64_t seed);

// Exact Z and Z_b by bitmask sweep; n <= 30.
SolutionStats solve_exhaustive(const ClauseDistribution& dist,
                               const FactorGraphInstance& inst,
                               bool keep_solutions = true);

// Exact coloring count by mixed-radix sweep; q^n <= 1e8.
SolutionStats solve_exhaustive(const ColoringInstance& inst,
                               bool keep_solutions = true);

// E[Z] = sum_j C(n, j) (E_phi ||phi||_theta^2)^m with theta = (2j - n)/n,
// evaluated in log domain; n <= 1e4.
double expected_z(const ClauseDistribution& dist, int n, double alpha);

OverlapStats overlap_stats(const ClauseDistribution& dist,
                           const FactorGraphInstance& inst,
                           std::size_t n_pairs, std::uint64_t seed);

OverlapStats overlap_stats(const ColoringInstance& inst, std::size_t n_pairs,
                           std::uint64_t seed);

// Exact total-variation distance between the joint law of (x_i, boundary)
// and the product of its marginals, where the boundary holds the variables
// at graph distance >= r from i (clauses/edges connect as cliques).
double correlation_decay(const ClauseDistribution& dist,
                         const FactorGraphInstance& inst, int var, int radius);
double correlation_decay(const ColoringInstance& inst, int var, int radius);

}  // namespace csplab
