#pragma once

#include <cstdint>
#include <vector>

#include "csplab/common.hpp"
#include "csplab/rng.hpp"

namespace csplab {

// Entropy/energy analysis of color-type vectors and matrices, membership in
// the deviation sets, the doubly-stochastic optimization, and the gap
// inequalities that feed the sphericity argument.

struct TypeVector {
    int q = 0;
    std::vector<double> w;  // nonnegative, sums to 1

    TypeVector(int colors, std::vector<double> entries);
    static TypeVector flat(int q);
    double dev_sq() const;  // ||w - flat||^2
};

struct TypeMatrix {
    int q = 0;
    std::vector<double> v;  // row-major q x q, nonnegative, sums to 1

    TypeMatrix(int colors, std::vector<double> entries);
    static TypeMatrix flat(int q);
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * q + j]; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * q + j]; }
    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    double dev_sq() const;          // ||v - flat||^2
    double row_marginal_dev() const;  // ||(v - flat) 1||^2
    double col_marginal_dev() const;  // ||1^t (v - flat)||^2
};

struct Functionals {
    double entropy = 0.0;
    double energy = 0.0;  // -inf when the log argument vanishes
};

// H(v) = -sum v log v; E(v) = log(1 - sum_i r_i^2 - sum_j c_j^2 + sum v^2).
Functionals functionals(const TypeMatrix& v);
// H(w) = -sum w log w; E(w) = log(1 - sum w^2).
Functionals functionals(const TypeVector& w);

struct VectorMembership {
    bool in_set = false;  // ||w - flat||^2 >= eps
    double dev = 0.0;
};
struct MatrixMembership {
    bool row_dev_ok = false;   // ||(v-flat)1||^2 <= delta
    bool col_dev_ok = false;   // ||1^t(v-flat)||^2 <= delta
    bool dev_big_enough = false;  // ||v-flat||^2 >= eps
    bool in_set = false;
    double row_dev = 0.0, col_dev = 0.0, dev = 0.0;
};

VectorMembership membership(const TypeVector& w, double eps);
MatrixMembership membership(const TypeMatrix& v, double delta, double eps);

struct OptResult {
    double value = -kInf;
    TypeMatrix argmax;
    bool converged = false;
    int restarts_used = 0;
};

struct TracePoint {
    int restart = 0;
    int iter = 0;
    double value = 0.0;
};

// Maximize H(v) + alpha E(v) over {v : q v doubly stochastic} by multistart
// entropic projected ascent. For alpha <= (q-1) log(q-1) the maximum sits at
// the flat matrix with value 2 log q + 2 alpha log(1 - 1/q).
OptResult birkhoff_sup(int q, double alpha, int n_restarts, std::uint64_t seed,
                       std::vector<TracePoint>* trace = nullptr);

// Same ascent restricted to the deviation set (uniform-marginal slice of
// B^{delta,eps}); used by the kappa feasibility test.
OptResult constrained_sup(int q, double coeff, double delta, double eps,
                          int n_restarts, std::uint64_t seed);

// Largest c with sup_{v in B} [H(v) + c E(v)] <= H(flat) + c E(flat),
// located by bisection over [0, 4 q log q].
double kappa(int q, double delta, double eps, double tol = 1e-4,
             std::uint64_t seed = 0);

// Left-minus-right slack of the gap inequalities; nonnegative when the
// inequality holds, +inf when the energy is -inf.
double gap_slack(const TypeVector& w, double alpha, double eps);
double gap_slack(const TypeMatrix& v, double alpha, double kappa_val,
                 double delta, double eps);

// Random draws from the deviation sets (uniform-marginal matrices).
TypeVector sample_b_vector(int q, double eps, Rng& rng);
TypeMatrix sample_b_matrix(int q, double delta, double eps, Rng& rng);

}  // namespace csplab
