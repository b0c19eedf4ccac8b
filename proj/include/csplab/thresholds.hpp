#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csplab/ensembles.hpp"

namespace csplab {

// Threshold formulas and their numeric verification: first/second moment
// satisfiability bounds, the naive-reconstruction recursion and its tangency
// threshold, the F/R iteration bounds, and q-coloring leading orders.

struct RecursionState {
    double alpha = 0.0;
    std::vector<double> z;  // stored prefix of the iterate sequence
    std::size_t iterations = 0;
    bool converged = false;
    double limit = 0.0;
};

struct BoundTrajectory {
    double alpha = 0.0;
    std::vector<double> h_ave;      // h_1, h_2, ... upper bounds
    std::vector<double> h_hat_ave;  // hat-h_2, hat-h_3, ...
    bool certified_nonrecon = false;
};

struct ThresholdReport {
    std::string ensemble;
    int k = 0;
    double omega = 0.0;
    double omega_hat = 0.0;
    double alpha_sat_lower = 0.0;       // Omega_k log 2
    double alpha_sat_upper = 0.0;       // hat-Omega_k log 2
    double alpha_cluster_leading = 0.0; // (Omega_k / k) log k
    double alpha_recon_leading = 0.0;   // same leading order
    double alpha_tree_numeric = 0.0;    // tangency of the recursion
    double alpha_tree_closed_form = 0.0; // quoted closed form (differs at finite k)
    bool second_moment_certificate = false;  // sup Phi < 0 at 0.9 * lower
    std::vector<std::string> notes;
};

// Per-site exponent of E[#solutions at magnetization theta]:
//   H2(theta) + alpha E_phi log ||phi||_theta^2.
double first_moment_exponent(const ClauseDistribution& dist, double alpha,
                             double theta);

// Pair-overlap exponent of the balanced second moment:
//   Phi(theta) = H(theta) + alpha E log[(phi, T_theta phi) / ||phi||^4],
//   H(theta) = -(1+theta)/2 log(1+theta) - (1-theta)/2 log(1-theta).
// Phi(0) = 0 identically.
double phi(const ClauseDistribution& dist, double alpha, double theta);

struct PhiSup {
    double sup = 0.0;
    double argmax = 0.0;
    double sup_from_zero = 0.0;  // over (0, 1], for the uniqueness-at-0 check
};
PhiSup phi_sup(const ClauseDistribution& dist, double alpha, double delta,
               int grid = 10000);

struct SatBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool second_moment_certificate = false;  // sup Phi < 0 over [0.02, 1] at 0.9 lower
};
SatBounds sat_bounds(const ClauseDistribution& dist);

// Iterates z <- 1 - exp(-k alpha z^(k-1) / Omega_k) from z = 1; the limit is
// the largest fixed point of that map in [0,1].
RecursionState naive_recursion_limit(const ClauseDistribution& dist, double alpha,
                                     double tol = 1e-12,
                                     std::size_t max_iter = 1000000);

// Tangency threshold of the recursion, scaled so Omega_k multiplies it:
// solve u = (k-1) log(1+u), then alpha = Omega u (1+1/u)^(k-1) / (k (k-1)).
double recursion_tangency_u(int k);
double tree_threshold_scaled(int k);  // tangency alpha for Omega = 1
double tree_threshold_numeric(const ClauseDistribution& dist, double tol = 1e-6);

// The closed form quoted alongside the recursion in the reference analysis:
// alpha* = Omega (1 + u (1+1/u)^(k-2)) / (k (k-1)). Differs from the
// tangency value at finite k; both are reported.
double tree_threshold_closed_form(const ClauseDistribution& dist);

// F_k(t) = 2 E[(d1, T_t d1) / ||phi||^2],
// R_k(t) = 2 E[(2 I_1/||phi||^2) sum_Q |(d1, gamma_Q)| t^max(|Q|,2)],
// with d1 the first-position derivative.
std::pair<double, double> iter_bound_functions(const ClauseDistribution& dist,
                                               double theta);

BoundTrajectory certify_nonreconstruction(const ClauseDistribution& dist,
                                          double alpha, int ell_max = 64);

struct ColoringThresholds {
    double alpha_sat = 0.0;    // q log q
    double alpha_cluster = 0.0; // (q/2) log q
    double alpha_recon = 0.0;  // (q/2)(log q + log log q)
};
ColoringThresholds coloring_thresholds(int q);

ThresholdReport threshold_report(const ClauseDistribution& dist);

// Exact mean of the first-step root bias under Poisson(k alpha) clause
// degree: 1 - exp(-k alpha / Omega_k).
double first_step_mean(const ClauseDistribution& dist, double alpha);

// The first-step expression quoted in the reference analysis,
// 1 - exp(-k alpha (1 - 1/Omega_k)); kept for side-by-side reporting.
double first_step_quoted(const ClauseDistribution& dist, double alpha);

}  // namespace csplab
