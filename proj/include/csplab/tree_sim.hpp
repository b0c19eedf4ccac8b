#pragma once

#include <cstdint>
#include <vector>

#include "csplab/ensembles.hpp"
#include "csplab/rng.hpp"

namespace csplab {

// Monte-Carlo laboratory for the Poisson(k alpha) factor-tree ensemble:
// sampling trees, sampling the top-down broadcast, exact root bias by
// message passing, and reconstruction-rate estimates.

struct TreeInstance {
    int k = 0;
    int depth = 0;
    double alpha = 0.0;

    struct VarNode {
        std::int32_t parent_factor = -1;  // -1 for the root
        std::int16_t generation = 0;
        std::int32_t first_factor = 0;  // index range into factors
        std::int32_t num_factors = 0;
    };
    struct FactorNode {
        std::int32_t parent_var = 0;
        std::int32_t clause_index = 0;  // into the distribution support
        std::int32_t first_child = 0;   // k-1 consecutive variable children
    };

    std::vector<VarNode> vars;       // BFS order, root first
    std::vector<FactorNode> factors;
    std::int64_t root_degree = 0;

    std::size_t node_count() const { return vars.size() + factors.size(); }
};

struct BroadcastSample {
    int root_value = 0;
    std::vector<std::int8_t> values;      // per variable node, +1/-1
    std::vector<std::int8_t> leaf_slice;  // values at generation == depth
};

struct BiasResult {
    double h = 0.0;
    bool plus_compatible = true;
    bool minus_compatible = true;
    double log_scale = 0.0;  // accumulated message normalization, log domain
};

struct ReconStats {
    double alpha = 0.0;
    int depth = 0;
    std::size_t n_samples = 0;
    double mean_abs_h = 0.0;
    double se_abs_h = 0.0;
    double mean_h_plus = 0.0;  // estimate of <h(x_l^+)>
    double se_h_plus = 0.0;
    double z_rate = 0.0;       // fraction with h = +1 (tolerance 1e-9)
    double se_z = 0.0;
    // consistency moments: d1 = x - x^2, d2 = sqrt((1-x)/(1+x)) - sqrt(1-x^2)
    double mean_d1 = 0.0, se_d1 = 0.0;
    double mean_d2 = 0.0, se_d2 = 0.0;
};

struct ConsistencyReport {
    std::size_t n = 0;
    double mean_x_minus_x2 = 0.0;
    double se_x_minus_x2 = 0.0;
    double mean_ratio_gap = 0.0;  // E sqrt((1-X)/(1+X)) - E sqrt(1-X^2)
    double se_ratio_gap = 0.0;
    bool pass_3sigma = true;
};

// Root gets Poisson(k alpha) factor children, deeper variables likewise;
// every factor carries k-1 children and an independent clause draw.
// Truncated at `depth` variable generations; deterministic under the seed.
TreeInstance sample_tree(const ClauseDistribution& dist, double alpha, int depth,
                         std::uint64_t seed);

// Top-down sampling: at each factor with parent value x the k-1 children are
// drawn uniformly from the clause's partial solution set for that prefix.
BroadcastSample broadcast(const ClauseDistribution& dist, const TreeInstance& tree,
                          int root_value, std::uint64_t seed);

// Exact conditional root mean given the generation-depth leaf values, by
// upward dynamic programming over unnormalized (w+, w-) pair messages.
// No likelihood ratios are formed, so frozen messages stay finite.
BiasResult root_bias(const ClauseDistribution& dist, const TreeInstance& tree,
                     const std::vector<std::int8_t>& leaf_values);

// Fresh tree + broadcast from root +1 + exact bias per sample, fused into a
// single streaming recursion (no tree is materialized). Returns one row per
// conditioning depth 1..depth, all extracted from the same sampled trees.
std::vector<ReconStats> reconstruction_sweep(const ClauseDistribution& dist,
                                             double alpha, int depth,
                                             std::size_t n_samples,
                                             std::uint64_t seed, int workers = 1,
                                             std::vector<double>* h_samples_deepest = nullptr);

ReconStats reconstruction_estimate(const ClauseDistribution& dist, double alpha,
                                   int depth, std::size_t n_samples,
                                   std::uint64_t seed, int workers = 1);

ConsistencyReport consistency_diagnostics(const std::vector<double>& h_samples);

}  // namespace csplab
