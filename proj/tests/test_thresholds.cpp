#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "csplab/thresholds.hpp"
#include "oracles.hpp"

using namespace csplab;

TEST_CASE("first moment exponent") {
    auto h3 = builtin("hyp2col", 3);
    CHECK(first_moment_exponent(h3, 0.0, 0.0) == doctest::Approx(std::log(2.0)));
    double boundary = omega_hat(h3) * std::log(2.0);
    CHECK(std::abs(first_moment_exponent(h3, boundary, 0.0)) < 1e-12);
    CHECK(std::abs(first_moment_exponent(builtin("xor", 4), 1.0, 0.0)) < 1e-12);
    CHECK_THROWS_AS(first_moment_exponent(h3, 1.0, 1.5), std::domain_error);
}

TEST_CASE("pair exponent at zero is exactly zero") {
    for (const char* name : {"hyp2col", "nae", "xor"}) {
        for (int k : {4, 6}) {
            auto d = builtin(name, k);
            for (double alpha : {0.1, 1.0, 10.0})
                CHECK(phi(d, alpha, 0.0) == 0.0);
        }
    }
}

TEST_CASE("pair exponent values") {
    auto h3 = builtin("hyp2col", 3);
    CHECK(phi(h3, 1.0, 1.0) == doctest::Approx(-std::log(2.0) + std::log(4.0 / 3.0))
                                   .epsilon(1e-12));
    CHECK(phi(h3, 1.0, 0.5) == doctest::Approx(-0.0507693282).epsilon(1e-8));

    // against the x-space noise correlation oracle
    Rng rng(21, 0, 0);
    for (int rep = 0; rep < 10; ++rep) {
        auto f = oracle::random_balanced(4, rng);
        if (f.norm_sq() == 0.0) continue;
        ClauseDistribution d;
        d.k = 4;
        d.support.push_back({f, 1.0});
        for (double theta : {0.2, 0.7}) {
            double corr = oracle::noise_correlation(f, theta);
            double expect = -0.5 * (1 + theta) * std::log(1 + theta) -
                            0.5 * (1 - theta) * std::log(1 - theta) +
                            2.0 * std::log(corr / (f.norm_sq() * f.norm_sq()));
            CHECK(phi(d, 2.0, theta) == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("pair exponent supremum") {
    auto h5 = builtin("hyp2col", 5);
    double alpha = 0.9 * omega(h5) * std::log(2.0);
    CHECK(phi_sup(h5, alpha, 0.02).sup < 0.0);

    // alpha = 0 leaves only the overlap entropy, maximized at the left edge
    auto s0 = phi_sup(h5, 0.0, 0.5);
    CHECK(s0.sup == doctest::Approx(-0.5 * 1.5 * std::log(1.5) -
                                    0.5 * 0.5 * std::log(0.5))
                        .epsilon(1e-9));
    CHECK(s0.argmax == doctest::Approx(0.5).epsilon(1e-4));

    // far above the threshold the sup turns positive
    CHECK(phi_sup(builtin("hyp2col", 3), 10.0, 0.5).sup > 0.0);

    // grid refinement stability
    for (const char* name : {"hyp2col", "xor"}) {
        auto d = builtin(name, name[0] == 'x' ? 4 : 8);
        double a = 0.9 * omega(d) * std::log(2.0);
        double s1 = phi_sup(d, a, 0.02, 10000).sup;
        double s2 = phi_sup(d, a, 0.02, 20000).sup;
        CHECK(std::abs(s1 - s2) < 1e-8);
    }
}

TEST_CASE("pair exponent has a positive bump at k = 4 near the lower bound") {
    // the negativity of the pair exponent over [0.02, 1] at 0.9 * lower holds
    // only from k = 5 up; at k = 4 the mid-range is positive
    auto h4 = builtin("hyp2col", 4);
    double alpha4 = 0.9 * omega(h4) * std::log(2.0);
    CHECK(phi(h4, alpha4, 0.5) > 0.0);
    CHECK(phi_sup(h4, alpha4, 0.02).sup > 0.0);
    for (int k = 5; k <= 8; ++k) {
        auto d = builtin("hyp2col", k);
        CHECK(phi_sup(d, 0.9 * omega(d) * std::log(2.0), 0.02).sup < 0.0);
    }
}

TEST_CASE("satisfiability bounds") {
    auto h3 = builtin("hyp2col", 3);
    auto b3 = sat_bounds(h3);
    CHECK(b3.lower == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(b3.upper == doctest::Approx(-std::log(2.0) / std::log(0.75)).epsilon(1e-12));
    CHECK(b3.lower == doctest::Approx(2.079442).epsilon(1e-6));
    CHECK(b3.upper == doctest::Approx(2.409420).epsilon(1e-6));

    auto bx = sat_bounds(builtin("xor", 4));
    CHECK(bx.lower == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bx.upper == doctest::Approx(1.0).epsilon(1e-12));

    for (int k : {6, 8}) {
        auto b = sat_bounds(builtin("hyp2col", k));
        CHECK(b.lower <= b.upper);
        CHECK(b.second_moment_certificate);
    }
}

TEST_CASE("naive recursion") {
    auto x4 = builtin("xor", 4);
    SUBCASE("below the threshold the limit is zero") {
        auto st = naive_recursion_limit(x4, 0.5);
        CHECK(st.converged);
        CHECK(st.limit == 0.0);
    }
    SUBCASE("alpha = 0 collapses in one step") {
        auto st = naive_recursion_limit(x4, 0.0);
        CHECK(st.z.size() >= 2);
        CHECK(st.z[1] == 0.0);
        CHECK(st.limit == 0.0);
    }
    SUBCASE("above the threshold the limit matches the largest fixed point") {
        auto st = naive_recursion_limit(x4, 0.9);
        CHECK(st.converged);
        CHECK(st.limit > 0.5);
        double ref = oracle::largest_fixed_point(4 * 0.9 / 1.0, 4);
        CHECK(st.limit == doctest::Approx(ref).epsilon(5e-6));
    }
    SUBCASE("iterates decrease and stay in [0,1]") {
        auto st = naive_recursion_limit(x4, 0.9);
        for (std::size_t i = 1; i < st.z.size(); ++i) {
            CHECK(st.z[i] <= st.z[i - 1] + 1e-15);
            CHECK(st.z[i] >= 0.0);
            CHECK(st.z[i] <= 1.0);
        }
    }
    SUBCASE("limit is monotone in alpha") {
        double prev = 0.0;
        for (double a : {0.5, 0.7, 0.78, 0.85, 1.0, 1.5}) {
            double lim = naive_recursion_limit(x4, a).limit;
            CHECK(lim >= prev - 1e-12);
            prev = lim;
        }
    }
}

TEST_CASE("tree thresholds") {
    auto x4 = builtin("xor", 4);
    double tx = tree_threshold_numeric(x4);
    CHECK(tx == doctest::Approx(0.7723).epsilon(0).scale(1.0).epsilon(1.3e-3));
    CHECK(std::abs(tx - 0.7723) <= 1e-3);

    auto h3 = builtin("hyp2col", 3);
    CHECK(std::abs(tree_threshold_numeric(h3) - 2.4554) <= 1e-3);

    CHECK(std::abs(tree_threshold_closed_form(x4) - 0.7406) <= 1e-3);
    CHECK(std::abs(tree_threshold_closed_form(h3) - 2.2565) <= 1e-3);

    // tangency vs bisection agreement is enforced inside the numeric path;
    // exercise it across builtins
    for (int k = 2; k <= 10; ++k) {
        CHECK_NOTHROW(tree_threshold_numeric(builtin("hyp2col", k)));
        if (k % 2 == 0) CHECK_NOTHROW(tree_threshold_numeric(builtin("xor", k)));
        if (k <= 10) CHECK_NOTHROW(tree_threshold_numeric(builtin("nae", k)));
    }

    // both forms approach (Omega/k) log k from above as k grows
    double prev = kInf;
    for (int k : {10, 30, 100, 1000}) {
        double ratio = tree_threshold_scaled(k) * k / std::log(double(k));
        CHECK(ratio > 1.0);
        CHECK(ratio < prev);
        prev = ratio;
    }
}

TEST_CASE("iteration bound functions") {
    for (const char* name : {"hyp2col", "nae"}) {
        for (int k : {3, 5}) {
            auto d = builtin(name, k);
            auto [f1, r1] = iter_bound_functions(d, 1.0);
            CHECK(f1 == doctest::Approx(1.0 / omega(d)).epsilon(1e-12));
            auto [f0, r0] = iter_bound_functions(d, 0.0);
            CHECK(f0 == 0.0);  // balanced: the derivative has no constant term
            (void)r1;
            (void)r0;
        }
    }
    auto x4 = builtin("xor", 4);
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
        auto [f, r] = iter_bound_functions(x4, t);
        CHECK(r == doctest::Approx(std::pow(t, 3)).epsilon(1e-12));
        CHECK(f == doctest::Approx(std::pow(t, 3)).epsilon(1e-12));
    }

    // envelope with the correlation-form decay constant, on the same grid
    for (int k : {3, 5, 8}) {
        auto d = builtin("hyp2col", k);
        auto rep = check_conditions(d, 201);
        double om = omega(d);
        for (int g = 1; g + 1 < 201; ++g) {
            double t = static_cast<double>(g) / 200.0;
            auto [f, r] = iter_bound_functions(d, t);
            (void)r;
            CHECK(f <= std::exp(-rep.decay_constant_corr * k * (1 - t)) / om +
                       1e-10);
        }
    }
}

TEST_CASE("nonreconstruction certification") {
    auto h3 = builtin("hyp2col", 3);
    SUBCASE("zero clause density certifies immediately") {
        auto tr = certify_nonreconstruction(h3, 0.0);
        CHECK(tr.h_ave[0] == 0.0);
        CHECK(tr.certified_nonrecon);
    }
    SUBCASE("first step value at alpha = 1") {
        auto tr = certify_nonreconstruction(h3, 1.0);
        CHECK(tr.h_ave[0] == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
        CHECK(tr.h_ave[0] == doctest::Approx(0.864665).epsilon(1e-6));
    }
    SUBCASE("collapse at half the leading-order threshold") {
        auto h8 = builtin("hyp2col", 8);
        double alpha = 0.5 * omega(h8) * std::log(8.0) / 8.0;
        auto tr = certify_nonreconstruction(h8, alpha, 64);
        CHECK(tr.certified_nonrecon);
        CHECK(tr.h_ave[1] == doctest::Approx(0.875).epsilon(1e-9));
    }
    SUBCASE("no certificate above the tree threshold") {
        auto tr = certify_nonreconstruction(h3, 3.0, 64);
        CHECK_FALSE(tr.certified_nonrecon);
    }
}

TEST_CASE("first step formulas") {
    auto h3 = builtin("hyp2col", 3);
    CHECK(first_step_mean(h3, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(first_step_quoted(h3, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
    // they agree only when Omega = 2; for parity ensembles the quoted form
    // degenerates to zero while the exact mean does not
    auto x4 = builtin("xor", 4);
    CHECK(first_step_quoted(x4, 1.0) == 0.0);
    CHECK(first_step_mean(x4, 1.0) == doctest::Approx(1.0 - std::exp(-4.0)));
}

TEST_CASE("coloring threshold leading orders") {
    auto t3 = coloring_thresholds(3);
    CHECK(t3.alpha_cluster == doctest::Approx(1.5 * std::log(3.0)).epsilon(1e-12));
    CHECK(t3.alpha_cluster == doctest::Approx(1.64792).epsilon(1e-5));
    CHECK(t3.alpha_sat == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-12));
    CHECK(t3.alpha_sat == doctest::Approx(3.29584).epsilon(1e-5));
    CHECK(t3.alpha_recon - t3.alpha_cluster ==
          doctest::Approx(1.5 * std::log(std::log(3.0))).epsilon(1e-12));
    CHECK(t3.alpha_recon > t3.alpha_cluster);
    CHECK_THROWS_AS(coloring_thresholds(2), validation_error);
}

TEST_CASE("threshold report is internally consistent") {
    auto rep = threshold_report(builtin("xor", 4));
    CHECK(rep.alpha_sat_lower <= rep.alpha_sat_upper);
    CHECK(rep.alpha_cluster_leading == rep.alpha_recon_leading);
    CHECK(rep.alpha_cluster_leading ==
          doctest::Approx(std::log(4.0) / 4.0).epsilon(1e-12));
    CHECK(rep.alpha_tree_numeric > rep.alpha_tree_closed_form);
}
