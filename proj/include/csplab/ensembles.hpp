#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csplab/clause_algebra.hpp"

namespace csplab {

// A weighted finite support of clauses, all of one arity.
struct WeightedClause {
    ClauseTable clause;
    double weight = 0.0;
};

struct ClauseDistribution {
    int k = 0;
    std::vector<WeightedClause> support;
    std::string name;
    std::string symmetry_note;  // set when an exploited symmetry collapsed the support

    void validate() const;  // weights positive, sum to 1 within 1e-12, equal k

    double expect(const std::vector<double>& per_clause) const;

    // E_phi log ||phi||_theta^2; -inf when some support norm vanishes.
    double mean_log_norm_sq_theta(double theta) const;
    double mean_log_norm_sq() const;
};

struct ConditionCheck {
    bool pass = false;
    std::string witness;  // empty when pass
};

struct DominanceCheck {
    bool pass = false;
    double worst_theta = 0.0;
    double worst_margin = 0.0;  // max over grid of E log|phi|_theta^2 - E log|phi|^2
};

// Verification report for the ensemble conditions and the two Fourier decay
// estimates. decay_constant_C bounds the norm ratio ||T_t d||^2/||d||^2 by
// exp(-Ck(1-t)); decay_constant_corr does the same for the correlation ratio
// (T_t d, d)/||d||^2, the form the iteration bounds consume.
struct ConditionReport {
    ConditionCheck permutation_symmetric;
    bool permutation_sampled = false;
    ConditionCheck balanced;
    ConditionCheck feasible;
    DominanceCheck dominance;
    double norm_floor = 0.0;       // min ||phi||^2 over support
    double l1_exponent_a = 0.0;    // max log_k sum_Q |d_Q| over support, positions
    double decay_constant_C = 0.0;
    double decay_argmin_theta = 0.0;
    double decay_constant_corr = 0.0;
    int grid_resolution = 0;
    // Low-weight coefficient mass ratio per l = 1..k:
    //   sum_{1<=|Q|<=l} phi_Q^2 / sum_{|Q|>=1} phi_Q^2, maximized over support.
    std::vector<double> low_weight_ratio;

    bool all_pass() const {
        return permutation_symmetric.pass && balanced.pass && feasible.pass &&
               dominance.pass;
    }
};

struct EnsembleConstants {
    double omega = 0.0;      // 1 / E[2 I_1(phi) / ||phi||^2]
    double omega_hat = 0.0;  // -1 / E log ||phi||^2
};

// Builtin families: "hyp2col" (hypergraph 2-coloring), "nae", "xor".
ClauseDistribution builtin(const std::string& name, int k);

ClauseDistribution load_distribution(const std::string& path);
ClauseDistribution parse_distribution(const std::string& json_text);
std::string distribution_to_json(const ClauseDistribution& dist);

ConditionReport check_conditions(const ClauseDistribution& dist,
                                 int theta_grid_size = 201);

double omega(const ClauseDistribution& dist);
double omega_hat(const ClauseDistribution& dist);
EnsembleConstants ensemble_constants(const ClauseDistribution& dist);

}  // namespace csplab
