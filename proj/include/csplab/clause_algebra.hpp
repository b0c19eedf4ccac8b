#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csplab/common.hpp"

namespace csplab {

// Exact finite Fourier analysis of functions on the hypercube {-1,+1}^k.
//
// Encoding: variable i corresponds to bit (i-1); a set bit means x_i = +1.
// Index 0 is the all-(-1) assignment. With this convention the character
// gamma_Q(x) is a parity popcount and the transform is a standard butterfly.

struct Assignment {
    int k = 0;
    std::uint32_t bits = 0;

    Assignment(int arity, std::uint32_t b);
    int spin(int i) const {  // value of x_i, +1 or -1
        return (bits >> (i - 1)) & 1u ? +1 : -1;
    }
    std::vector<int> to_vector() const;
    static Assignment from_vector(const std::vector<int>& x);
};

// A real-valued table on {-1,+1}^k indexed by Assignment::bits.
// Boolean clauses hold {0,1}; discrete derivatives hold {-1/2, 0, +1/2}.
struct ClauseTable {
    int k = 0;
    std::vector<double> values;

    ClauseTable() = default;
    ClauseTable(int arity, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    bool is_boolean() const;

    // ||f||^2 under the uniform measure, 2^-k sum f(x)^2.
    double norm_sq() const;

    // "truth_table" string of '0'/'1' characters, index order ascending.
    static ClauseTable from_truth_table(int k, const std::string& tt);
    std::string truth_table() const;

    // Serialization: { "k": <int>, "truth_table": "<0/1 string>" }.
    static ClauseTable from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Fourier coefficients; entry at mask m is f_Q with Q = {i : bit (i-1) set}.
struct FourierSpectrum {
    int k = 0;
    std::vector<double> coeffs;

    // Parseval sum: sum_Q coeffs[Q]^2.
    double energy() const;
    // Coefficient mass grouped by |Q|, index 0..k.
    std::vector<double> energy_by_weight() const;
};

struct BiasVector {
    int k = 0;
    std::vector<double> h;

    BiasVector(int arity, std::vector<double> values);
    static BiasVector constant(int arity, double theta);
};

// Partial solution sets with respect to the first coordinate.
// S+/S- hold the (k-1)-bit assignments y with phi(+1, y) = 1 / phi(-1, y) = 1;
// lambda_plus = S+ \ S-, lambda_minus = S- \ S+.
struct PartialSets {
    int k = 0;
    std::vector<std::uint32_t> s_plus, s_minus, lambda_plus, lambda_minus;
};

Assignment index_to_assignment(std::uint32_t bits, int k);
std::uint32_t assignment_to_index(const std::vector<int>& x);

// coeffs[Q] = 2^-k sum_x f(x) gamma_Q(x); in-place fast transform, O(k 2^k).
FourierSpectrum fourier_transform(const ClauseTable& f);

// f(x) = sum_Q coeffs[Q] gamma_Q(x); inverse of fourier_transform.
ClauseTable inverse_fourier(const FourierSpectrum& s);

// (f,g)_theta = sum_x f(x) g(x) v_theta(x), v_theta(x) = prod (1+x_i theta)/2.
double inner_theta(const ClauseTable& f, const ClauseTable& g, double theta);

// Norm squared under v_theta; equals inner_theta(f, f, theta).
double norm_sq_theta(const ClauseTable& f, double theta);

// Generalized noise operator: coeffs[Q] *= prod_{i in Q} h_i.
FourierSpectrum noise_apply(const FourierSpectrum& s, const BiasVector& h);
FourierSpectrum noise_apply(const FourierSpectrum& s, double theta);

// Discrete derivative in coordinate i: a table on {-1,+1}^(k-1) with
// f_i(y) = (f(y with x_i=+1) - f(y with x_i=-1)) / 2.
ClauseTable derivative(const ClauseTable& f, int i);

// I_i(f) = || derivative(f, i) ||^2 under the uniform measure.
double influence(const ClauseTable& f, int i);

// (f, T_theta f) = sum_Q coeffs[Q]^2 theta^|Q|.
double self_correlation(const FourierSpectrum& s, double theta);

PartialSets partial_sets(const ClauseTable& f);

}  // namespace csplab
