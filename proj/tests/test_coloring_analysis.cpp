#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csplab/coloring_analysis.hpp"

using namespace csplab;

namespace {

TypeMatrix identity_over_q(int q) {
    std::vector<double> v(static_cast<std::size_t>(q) * q, 0.0);
    for (int i = 0; i < q; ++i) v[i * q + i] = 1.0 / q;
    return TypeMatrix(q, v);
}

TypeMatrix permuted(const TypeMatrix& m, const std::vector<int>& row_pi,
                    const std::vector<int>& col_pi) {
    std::vector<double> v(m.v.size());
    for (int i = 0; i < m.q; ++i)
        for (int j = 0; j < m.q; ++j)
            v[static_cast<std::size_t>(row_pi[i]) * m.q + col_pi[j]] = m.at(i, j);
    return TypeMatrix(m.q, v);
}

}  // namespace

TEST_CASE("functionals at the reference points") {
    auto flat3 = TypeMatrix::flat(3);
    auto f = functionals(flat3);
    CHECK(f.entropy == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
    CHECK(f.energy == doctest::Approx(2.0 * std::log(2.0 / 3.0)).epsilon(1e-12));

    auto fid = functionals(identity_over_q(3));
    CHECK(fid.entropy == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fid.energy == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));

    TypeVector corner(3, {1.0, 0.0, 0.0});
    auto fc = functionals(corner);
    CHECK(fc.entropy == 0.0);
    CHECK(fc.energy == -kInf);

    auto fw = functionals(TypeVector::flat(4));
    CHECK(fw.entropy == doctest::Approx(std::log(4.0)));
    CHECK(fw.energy == doctest::Approx(std::log(0.75)));
}

TEST_CASE("membership checks") {
    auto flat = TypeMatrix::flat(3);
    CHECK_FALSE(membership(flat, 0.0, 0.1).in_set);

    auto idm = membership(identity_over_q(3), 0.0, 0.1);
    CHECK(idm.row_dev_ok);
    CHECK(idm.col_dev_ok);
    CHECK(idm.dev == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(idm.in_set);

    CHECK_FALSE(membership(TypeVector::flat(3), 0.05).in_set);
}

TEST_CASE("entropy and energy are permutation invariant") {
    Rng rng(3, 0, 0);
    for (int rep = 0; rep < 50; ++rep) {
        auto m = sample_b_matrix(3, 0.0, 0.05, rng);
        std::vector<int> pi = {1, 2, 0}, sigma = {2, 0, 1};
        auto p = permuted(m, pi, sigma);
        auto f0 = functionals(m);
        auto f1 = functionals(p);
        CHECK(std::abs(f0.entropy - f1.entropy) < 1e-12);
        CHECK(std::abs(f0.energy - f1.energy) < 1e-12);
    }
}

TEST_CASE("energy deviation identity") {
    // exp(E(v)) = (1-1/q)^2 + ||v-flat||^2 - ||(v-flat)1||^2 - ||1t(v-flat)||^2,
    // i.e. the separation bound used downstream holds with equality
    Rng rng(4, 0, 0);
    for (int rep = 0; rep < 10000; ++rep) {
        int q = 3 + static_cast<int>(rng.next_below(3));
        std::vector<double> v(static_cast<std::size_t>(q) * q);
        double sum = 0.0;
        for (double& x : v) {
            x = -std::log(std::max(rng.next_double(), 1e-300));
            sum += x;
        }
        for (double& x : v) x /= sum;
        TypeMatrix m(q, v);
        double arg = (1.0 - 1.0 / q) * (1.0 - 1.0 / q) + m.dev_sq() -
                     m.row_marginal_dev() - m.col_marginal_dev();
        double e = functionals(m).energy;
        if (arg <= 1e-300)
            CHECK(e == -kInf);
        else
            CHECK(std::abs(e - std::log(arg)) < 1e-10);
    }
}

TEST_CASE("doubly stochastic maximization") {
    const double lq = std::log(3.0), l23 = std::log(2.0 / 3.0);
    for (double alpha : {0.5, 1.0, 2.0 * std::log(2.0)}) {
        auto r = birkhoff_sup(3, alpha, 64, 11);
        CHECK(std::abs(r.value - (2.0 * lq + 2.0 * alpha * l23)) < 1e-6);
        double worst = 0.0;
        for (double x : r.argmax.v) worst = std::max(worst, std::abs(x - 1.0 / 9));
        CHECK(worst < 1e-4);
    }

    auto r0 = birkhoff_sup(3, 0.0, 16, 11);
    CHECK(std::abs(r0.value - 2.0 * lq) < 1e-8);

    // far above the threshold the maximizer leaves the flat matrix
    auto rbig = birkhoff_sup(3, 10.0, 64, 11);
    CHECK(rbig.value > 2.0 * lq + 20.0 * l23 + 1e-3);
    double worst = 0.0;
    for (double x : rbig.argmax.v) worst = std::max(worst, std::abs(x - 1.0 / 9));
    CHECK(worst > 0.01);
}

TEST_CASE("kappa bisection") {
    double k0 = kappa(3, 0.0, 0.1, 1e-4, 5);
    CHECK(k0 >= 2.0 * std::log(2.0) - 1e-3);
    // the permutation family forces infeasibility above log q / log(q/(q-1))
    CHECK(k0 <= std::log(3.0) / std::log(1.5) + 1e-2);

    SUBCASE("monotone in the set parameters") {
        double k_delta = kappa(3, 0.01, 0.1, 1e-4, 5);
        CHECK(k_delta <= k0 + 1e-3);
        double k_eps = kappa(3, 0.0, 0.15, 1e-4, 5);
        CHECK(k_eps >= k0 - 1e-3);
    }
    SUBCASE("empty deviation set is rejected") {
        CHECK_THROWS_AS(kappa(3, 0.0, 0.5, 1e-3, 5), validation_error);
    }
    SUBCASE("a positive-delta window exists below the threshold") {
        double alpha = 0.95 * 2.0 * std::log(2.0);
        double delta = 0.05;
        bool found = false;
        for (int halvings = 0; halvings < 8 && !found; ++halvings) {
            if (kappa(3, delta, 0.1, 1e-3, 5) >= alpha) found = true;
            delta /= 2.0;
        }
        CHECK(found);
    }
}

TEST_CASE("vector gap inequality over random draws") {
    Rng rng(6, 0, 0);
    for (int q : {3, 4, 5}) {
        for (double eps : {0.05, 0.1, 0.2}) {
            for (int rep = 0; rep < 2000; ++rep) {
                auto w = sample_b_vector(q, eps, rng);
                CHECK(gap_slack(w, 1.3, eps) >= -1e-9);
            }
        }
    }
    // degenerate corner: infinite slack
    TypeVector corner(3, {1.0, 0.0, 0.0});
    CHECK(gap_slack(corner, 2.0, 0.1) == kInf);
    // outside the set: precondition violation
    CHECK_THROWS_AS(gap_slack(TypeVector::flat(3), 1.0, 0.1), validation_error);
}

TEST_CASE("matrix gap inequality over random draws") {
    double kap = kappa(3, 0.02, 0.1, 1e-4, 5);
    REQUIRE(kap > 1.0);
    Rng rng(7, 0, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        auto v = sample_b_matrix(3, 0.02, 0.1, rng);
        CHECK(gap_slack(v, 1.0, kap, 0.02, 0.1) >= -1e-9);
    }
    CHECK_THROWS_AS(gap_slack(TypeMatrix::flat(3), 1.0, kap, 0.02, 0.1),
                    validation_error);
    CHECK_THROWS_AS(
        gap_slack(sample_b_matrix(3, 0.0, 0.1, rng), 1.0, kap, 0.06, 0.1),
        validation_error);  // needs eps > 2 delta
}

TEST_CASE("deviation set samplers hit the set") {
    Rng rng(8, 0, 0);
    for (int rep = 0; rep < 500; ++rep) {
        auto w = sample_b_vector(4, 0.1, rng);
        CHECK(w.dev_sq() >= 0.1 - 1e-12);
        double sum = std::accumulate(w.w.begin(), w.w.end(), 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));

        auto m = sample_b_matrix(3, 0.0, 0.08, rng);
        auto mm = membership(m, 1e-10, 0.08);
        CHECK(mm.in_set);
    }
}
