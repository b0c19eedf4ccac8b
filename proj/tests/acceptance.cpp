// Acceptance suite: one line per criterion, [PASS]/[FAIL], nonzero exit when
// any criterion fails. Tolerances are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csplab/coloring_analysis.hpp"
#include "csplab/graph_sim.hpp"
#include "csplab/stats.hpp"
#include "csplab/thresholds.hpp"
#include "csplab/tree_sim.hpp"
#include "oracles.hpp"

using namespace csplab;

namespace {

// enumerate all completions of the non-leaf variables; reference for the
// message-passing bias
double brute_bias(const ClauseDistribution& dist, const TreeInstance& tree,
                  const std::vector<std::int8_t>& leaves) {
    std::vector<int> free_vars;
    std::vector<std::int8_t> value(tree.vars.size(), 0);
    std::size_t cursor = 0;
    for (std::size_t vi = 0; vi < tree.vars.size(); ++vi) {
        if (tree.vars[vi].generation == tree.depth && tree.depth > 0)
            value[vi] = leaves[cursor++];
        else
            free_vars.push_back(static_cast<int>(vi));
    }
    double count[2] = {0.0, 0.0};
    for (std::uint64_t m = 0; m < (1ull << free_vars.size()); ++m) {
        for (std::size_t b = 0; b < free_vars.size(); ++b)
            value[free_vars[b]] = (m >> b) & 1ull ? +1 : -1;
        bool sat = true;
        for (const auto& f : tree.factors) {
            std::uint32_t idx = value[f.parent_var] > 0 ? 1u : 0u;
            for (int cc = 0; cc < tree.k - 1; ++cc)
                if (value[f.first_child + cc] > 0) idx |= 1u << (cc + 1);
            if (dist.support[f.clause_index].clause.values[idx] == 0.0) {
                sat = false;
                break;
            }
        }
        if (sat) count[value[0] > 0 ? 1 : 0] += 1.0;
    }
    return (count[1] - count[0]) / (count[1] + count[0]);
}

int g_failures = 0;
std::vector<std::string> g_notes;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

struct Criterion {
    int id;
    std::string label;
    double budget_s = 0.0;  // 0 = no stated runtime limit
    bool ok = true;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void require(bool cond, const std::string& detail) {
        if (!cond) {
            ok = false;
            g_notes.push_back("criterion " + std::to_string(id) + ": " + detail);
            std::printf("       ! %s\n", detail.c_str());
        }
    }
    void finish() {
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (budget_s > 0.0)
            require(secs < budget_s, "runtime " + fmt(secs) + " s exceeds " +
                                         fmt(budget_s) + " s");
        std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id,
                    label.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

// ---------------------------------------------------------------------------

void criterion_1_constants() {
    Criterion c{1, "ensemble constants, exact", 1.0};
    for (int k = 3; k <= 10; ++k) {
        double expect = std::pow(2.0, k - 1) - 1.0;
        double oh = omega(builtin("hyp2col", k));
        double on = omega(builtin("nae", k));
        c.require(std::abs(oh - expect) < 1e-12,
                  "omega(hyp2col," + std::to_string(k) + ") err " +
                      fmt(std::abs(oh - expect)));
        c.require(std::abs(on - expect) < 1e-12,
                  "omega(nae," + std::to_string(k) + ") err " +
                      fmt(std::abs(on - expect)));
        if (k % 2 == 0) {
            double ox = omega(builtin("xor", k));
            double oxh = omega_hat(builtin("xor", k));
            c.require(std::abs(ox - 1.0) < 1e-12, "omega(xor) err");
            c.require(std::abs(oxh - 1.0 / std::log(2.0)) < 1e-12,
                      "omega_hat(xor) err");
        }
    }
    c.finish();
}

void criterion_2_fourier_properties() {
    Criterion c{2, "Fourier algebra property suite, 1000 random clauses each", 10.0};
    Rng rng(1001, 0, 0);
    auto random_k = [&] { return 2 + static_cast<int>(rng.next_below(9)); };

    for (int rep = 0; rep < 1000; ++rep) {  // Parseval
        auto f = oracle::random_boolean(random_k(), rng);
        auto s = fourier_transform(f);
        if (!(std::abs(s.energy() - f.norm_sq()) < 1e-12)) {
            c.require(false, "parseval violation at rep " + std::to_string(rep));
            break;
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {  // roundtrip
        auto f = oracle::random_boolean(random_k(), rng);
        auto back = inverse_fourier(fourier_transform(f));
        double worst = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
        if (!(worst < 1e-12)) {
            c.require(false, "roundtrip violation " + fmt(worst));
            break;
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {  // derivative shift
        int k = random_k();
        auto f = oracle::random_boolean(k, rng);
        auto fs = fourier_transform(f);
        int i = 1 + static_cast<int>(rng.next_below(k));
        auto ds = fourier_transform(derivative(f, i));
        const std::uint32_t low = (1u << (i - 1)) - 1;
        double worst = 0.0;
        for (std::uint32_t q = 0; q < ds.coeffs.size(); ++q) {
            std::uint32_t lifted = (q & low) | ((q & ~low) << 1) | (1u << (i - 1));
            worst = std::max(worst, std::abs(ds.coeffs[q] - fs.coeffs[lifted]));
        }
        if (!(worst < 1e-12)) {
            c.require(false, "derivative shift violation " + fmt(worst));
            break;
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {  // noise semigroup
        auto s = fourier_transform(oracle::random_boolean(random_k(), rng));
        double t1 = rng.next_double(), t2 = rng.next_double();
        auto a = noise_apply(noise_apply(s, t1), t2);
        auto b = noise_apply(s, t1 * t2);
        double worst = 0.0;
        for (std::size_t q = 0; q < a.coeffs.size(); ++q)
            worst = std::max(worst, std::abs(a.coeffs[q] - b.coeffs[q]));
        if (!(worst < 1e-12)) {
            c.require(false, "semigroup violation " + fmt(worst));
            break;
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {  // balanced odd coefficients vanish
        int k = random_k();
        auto f = oracle::random_balanced(k, rng);
        auto s = fourier_transform(f);
        double worst = 0.0;
        for (std::uint32_t q = 0; q < s.coeffs.size(); ++q)
            if (std::popcount(q) & 1)
                worst = std::max(worst, std::abs(s.coeffs[q]));
        if (!(worst < 1e-12)) {
            c.require(false, "odd coefficient violation " + fmt(worst));
            break;
        }
    }
    c.finish();
}

void criterion_3_decay_identity() {
    Criterion c{3, "analytic decay identity and exponential envelope"};
    double worst_identity = 0.0, worst_envelope = -kInf;
    int env_k = 0;
    double env_t = 0.0;
    for (int k = 3; k <= 8; ++k) {
        auto phi_t = builtin("hyp2col", k).support[0].clause;
        auto d1 = derivative(phi_t, 1);
        auto ds = fourier_transform(d1);
        double dsq = d1.norm_sq();
        for (int g = 0; g <= 100; ++g) {
            double t = g / 100.0;
            double ratio = self_correlation(ds, t) / dsq;
            double closed =
                std::pow((1 + t) / 2, k - 1) - std::pow((1 - t) / 2, k - 1);
            worst_identity = std::max(worst_identity, std::abs(ratio - closed));
            double excess = ratio - std::exp(-k * (1 - t) / 2.0);
            if (excess > worst_envelope) {
                worst_envelope = excess;
                env_k = k;
                env_t = t;
            }
        }
    }
    c.require(worst_identity < 1e-10,
              "identity error " + fmt(worst_identity) + " exceeds 1e-10");
    c.require(worst_envelope <= 1e-10,
              "envelope exp(-k(1-t)/2) violated by " + fmt(worst_envelope) +
                  " at k=" + std::to_string(env_k) + ", theta=" + fmt(env_t) +
                  " (holds with exponent (k-1)/2; see notes)");
    c.finish();
}

void criterion_4_second_moment() {
    Criterion c{4, "second moment: zero at zero, negative sup, UNSAT exponent", 30.0};
    std::vector<ClauseDistribution> builtins;
    for (int k = 3; k <= 8; ++k) builtins.push_back(builtin("hyp2col", k));
    for (int k = 3; k <= 6; ++k) builtins.push_back(builtin("nae", k));
    for (int k = 4; k <= 8; k += 2) builtins.push_back(builtin("xor", k));

    for (const auto& d : builtins)
        for (double alpha : {0.1, 1.0, 10.0})
            c.require(phi(d, alpha, 0.0) == 0.0,
                      d.name + " k=" + std::to_string(d.k) +
                          ": pair exponent not exactly zero at theta 0");

    for (int k = 4; k <= 8; ++k) {
        auto d = builtin("hyp2col", k);
        double alpha = 0.9 * omega(d) * std::log(2.0);
        auto sup = phi_sup(d, alpha, 0.02);
        c.require(sup.sup < 0.0, "hyp2col k=" + std::to_string(k) +
                                     ": sup over [0.02,1] is " + fmt(sup.sup) +
                                     " at theta=" + fmt(sup.argmax));
    }

    for (const auto& d : builtins) {
        double alpha = 1.1 * omega_hat(d) * std::log(2.0);
        double worst = -kInf;
        for (int g = 0; g <= 200; ++g) {
            double theta = -1.0 + 2.0 * g / 200.0;
            worst = std::max(worst, first_moment_exponent(d, alpha, theta));
        }
        c.require(worst < 0.0, d.name + " k=" + std::to_string(d.k) +
                                   ": first-moment exponent " + fmt(worst));
    }
    c.finish();
}

void criterion_5_tree_thresholds() {
    Criterion c{5, "tree threshold numerics and asymptotic ratio"};
    auto both = [&](const ClauseDistribution& d) {
        double closed = omega(d) * tree_threshold_scaled(d.k);
        double numeric = tree_threshold_numeric(d, 1e-6);
        c.require(std::abs(numeric - closed) <
                      1e-6 * std::max(1.0, std::abs(closed)),
                  d.name + " k=" + std::to_string(d.k) + ": tangency " +
                      fmt(closed) + " vs cross-validated " + fmt(numeric));
    };
    for (int k = 2; k <= 10; ++k) {
        both(builtin("hyp2col", k));
        both(builtin("nae", k));
        if (k % 2 == 0) both(builtin("xor", k));
    }
    double x4 = tree_threshold_numeric(builtin("xor", 4));
    c.require(std::abs(x4 - 0.7723) <= 1e-3,
              "xor k=4 threshold " + fmt(x4) + " not within 1e-3 of 0.7723");

    double prev = kInf;
    bool monotone = true;
    for (int k = 10; k <= 100; ++k) {
        double ratio = tree_threshold_scaled(k) * k / std::log(double(k));
        if (ratio > 1.0 == false || ratio >= prev) monotone = false;
        prev = ratio;
    }
    c.require(monotone, "ratio alpha k / (Omega log k) not decreasing in (1,..)");
    c.require(prev < 2.2, "ratio at k=100 is " + fmt(prev));
    c.finish();
}

void criterion_6_bias_exactness() {
    Criterion c{6, "message-passing bias equals brute force on 200 trees"};
    Rng pick(600, 0, 0);
    int checked = 0;
    std::uint64_t s = 0;
    double worst = 0.0;
    while (checked < 200 && s < 100000) {
        ++s;
        const char* names[3] = {"hyp2col", "xor", "nae"};
        int which = static_cast<int>(pick.next_below(3));
        int k = which == 1 ? 4 : 3;
        auto d = builtin(names[which], k);
        int depth = 1 + static_cast<int>(pick.next_below(3));
        double alpha = 0.2 + 0.1 * static_cast<double>(pick.next_below(5));
        auto t = sample_tree(d, alpha, depth, s);
        if (t.vars.size() > 20 || t.factors.empty()) continue;
        auto b = broadcast(d, t, +1, s);
        auto r = root_bias(d, t, b.leaf_slice);
        double ref = brute_bias(d, t, b.leaf_slice);
        worst = std::max(worst, std::abs(r.h - ref));
        ++checked;
    }
    c.require(checked == 200, "only assembled " + std::to_string(checked) +
                                  " trees within the size gate");
    c.require(worst < 1e-10, "worst bias mismatch " + fmt(worst));
    c.finish();
}

void criterion_7_first_step() {
    Criterion c{7, "first-step mean against the quoted formula, depth 1", 60.0};
    auto d = builtin("hyp2col", 3);
    for (double alpha : {0.5, 1.0, 2.0}) {
        std::vector<double> h;
        auto rows = reconstruction_sweep(d, alpha, 1, 10000, 700, 2, &h);
        const auto& row = rows.back();
        bool support_ok = true;
        for (double x : h)
            if (!(std::abs(x) < 1e-9 || std::abs(x - 1.0) < 1e-9))
                support_ok = false;
        c.require(support_ok,
                  "alpha=" + fmt(alpha) + ": bias support not within {0,1}");
        double quoted = first_step_quoted(d, alpha);
        double gap = std::abs(row.mean_h_plus - quoted);
        c.require(gap <= 3.0 * row.se_h_plus,
                  "alpha=" + fmt(alpha) + ": sampled mean " +
                      fmt(row.mean_h_plus) + " vs quoted 1-exp(-ka(1-1/Omega))=" +
                      fmt(quoted) + ", gap " + fmt(gap) + " > 3se=" +
                      fmt(3.0 * row.se_h_plus) + " [exact Poisson mean " +
                      fmt(first_step_mean(d, alpha)) + " matches within " +
                      fmt(std::abs(row.mean_h_plus - first_step_mean(d, alpha)) /
                          std::max(row.se_h_plus, 1e-12)) + " se]");
    }
    c.finish();
}

void criterion_8_xor_recursion() {
    Criterion c{8, "parity recursion exactness across depths 1..6", 300.0};
    auto d = builtin("xor", 4);
    for (double alpha : {0.85, 0.9}) {
        auto rows = reconstruction_sweep(d, alpha, 6, 10000, 800, 2);
        auto rec = naive_recursion_limit(d, alpha);
        for (const auto& row : rows) {
            double iterate = rec.z[row.depth];
            double gap = std::abs(row.z_rate - iterate);
            c.require(gap <= 3.0 * row.se_z + 1e-9,
                      "alpha=" + fmt(alpha) + " depth " +
                          std::to_string(row.depth) + ": z-rate " +
                          fmt(row.z_rate) + " vs iterate " + fmt(iterate));
            c.require(std::abs(row.mean_d1) <= 3.0 * row.se_d1 + 1e-12,
                      "alpha=" + fmt(alpha) + " depth " +
                          std::to_string(row.depth) + ": consistency gap " +
                          fmt(row.mean_d1));
        }
    }
    c.finish();
}

void criterion_9_expected_count() {
    Criterion c{9, "closed-form expected count vs 2000-instance mean", 120.0};
    auto d = builtin("hyp2col", 3);
    Accumulator acc;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        auto inst = sample_instance(d, 12, 0.5, 90000 + s);
        acc.add(static_cast<double>(solve_exhaustive(d, inst, false).z));
    }
    double closed = expected_z(d, 12, 0.5);
    double gap = std::abs(acc.mean() - closed);
    c.require(gap <= 3.0 * acc.std_error(),
              "mean " + fmt(acc.mean()) + " vs closed form " + fmt(closed) +
                  ", gap " + fmt(gap) + " > 3se=" + fmt(3.0 * acc.std_error()));
    c.finish();
}

void criterion_10_coloring_optimization() {
    Criterion c{10, "entropy-energy optimization, kappa floor, gap sweeps", 300.0};
    const double lq = std::log(3.0), l23 = std::log(2.0 / 3.0);
    for (double alpha : {0.5, 1.0, 2.0 * std::log(2.0)}) {
        auto r = birkhoff_sup(3, alpha, 64, 1000);
        double analytic = 2.0 * lq + 2.0 * alpha * l23;
        c.require(std::abs(r.value - analytic) < 1e-6,
                  "alpha=" + fmt(alpha) + ": value " + fmt(r.value) + " vs " +
                      fmt(analytic));
        double worst = 0.0;
        for (double x : r.argmax.v)
            worst = std::max(worst, std::abs(x - 1.0 / 9));
        c.require(worst < 1e-4, "alpha=" + fmt(alpha) +
                                    ": argmax deviates from flat by " + fmt(worst));
    }

    double kap0 = kappa(3, 0.0, 0.1, 1e-4, 1000);
    c.require(kap0 >= 2.0 * std::log(2.0) - 1e-3,
              "kappa(0, 0.1) = " + fmt(kap0) + " below 2 log 2 - 1e-3");

    Rng rng(1003, 0, 0);
    double min_vec = kInf;
    for (int i = 0; i < 10000; ++i) {
        auto w = sample_b_vector(3, 0.1, rng);
        min_vec = std::min(min_vec, gap_slack(w, 1.0, 0.1));
    }
    c.require(min_vec >= -1e-9, "vector gap slack " + fmt(min_vec));

    double kap = kappa(3, 0.02, 0.1, 1e-4, 1000);
    double min_mat = kInf;
    for (int i = 0; i < 10000; ++i) {
        auto v = sample_b_matrix(3, 0.02, 0.1, rng);
        min_mat = std::min(min_mat, gap_slack(v, 1.0, kap, 0.02, 0.1));
    }
    c.require(min_mat >= -1e-9, "matrix gap slack " + fmt(min_mat));
    c.finish();
}

void criterion_11_sphericity_trend() {
    Criterion c{11, "sphericity trend, overlap symmetry, correlation decay", 600.0};
    double prev = kInf;
    for (int n : {8, 10, 12}) {
        Accumulator mean_dev;
        for (std::uint64_t s = 0; s < 100; ++s) {
            auto inst = sample_coloring_instance(n, 3, 1.0, 1100 + s);
            if (solve_exhaustive(inst, false).z == 0) continue;
            mean_dev.add(overlap_stats(inst, 1, 7).exact_mean_type_dev);
        }
        c.require(mean_dev.n > 80, "too few colorable instances at n=" +
                                       std::to_string(n));
        c.require(mean_dev.mean() < prev,
                  "mean type deviation not strictly decreasing at n=" +
                      std::to_string(n) + " (" + fmt(mean_dev.mean()) + ")");
        prev = mean_dev.mean();
    }

    auto d = builtin("hyp2col", 3);
    int tested = 0;
    for (std::uint64_t s = 0; s < 40 && tested < 8; ++s) {
        auto inst = sample_instance(d, 14, 0.5, 1200 + s);
        if (solve_exhaustive(d, inst, false).z == 0) continue;
        ++tested;
        auto ov = overlap_stats(d, inst, 200000, 1300 + s);
        c.require(std::abs(ov.mean_overlap) <= 3.0 * ov.se_overlap + 1e-12,
                  "instance seed " + std::to_string(1200 + s) +
                      ": overlap mean " + fmt(ov.mean_overlap) + " vs 3se " +
                      fmt(3.0 * ov.se_overlap));
        double prev_tv = kInf;
        for (int r = 1; r <= 4; ++r) {
            double tv = correlation_decay(d, inst, 0, r);
            c.require(tv <= prev_tv + 1e-12,
                      "correlation decay increased at r=" + std::to_string(r));
            prev_tv = tv;
        }
    }
    c.finish();
}

void criterion_12_reproducibility(const std::string& cli) {
    Criterion c{12, "byte-identical CLI reruns under a fixed seed"};
    if (cli.empty()) {
        c.require(false, "no CLI path supplied (--cli)");
        c.finish();
        return;
    }
    auto run_pair = [&](const std::string& args, const std::string& tag) {
        std::string f1 = "/tmp/csplab_accept_" + tag + "_1.out";
        std::string f2 = "/tmp/csplab_accept_" + tag + "_2.out";
        std::string cmd1 = cli + " " + args + " --out " + f1;
        std::string cmd2 = cli + " " + args + " --out " + f2;
        if (std::system(cmd1.c_str()) != 0 || std::system(cmd2.c_str()) != 0) {
            c.require(false, tag + ": CLI invocation failed");
            return;
        }
        std::ifstream a(f1, std::ios::binary), b(f2, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        c.require(sa.str() == sb.str() && !sa.str().empty(),
                  tag + ": outputs differ between reruns");
        std::remove(f1.c_str());
        std::remove(f2.c_str());
    };
    run_pair("tree-recon --ensemble xor --k 4 --alpha 0.9 --depth 4 --samples 3000 --seed 1 --workers 2",
             "tree");
    run_pair("instances --ensemble hyp2col --k 3 --n 13 --alpha 0.5 --seed 5 --decay-rmax 3",
             "inst");
    run_pair("coloring-opt --q 3 --alpha 1.0 --kappa --sweeps 3000 --seed 9",
             "copt");
    run_pair("thresholds --ensemble nae --k 5 --table", "thr");
    c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    criterion_1_constants();
    criterion_2_fourier_properties();
    criterion_3_decay_identity();
    criterion_4_second_moment();
    criterion_5_tree_thresholds();
    criterion_6_bias_exactness();
    criterion_7_first_step();
    criterion_8_xor_recursion();
    criterion_9_expected_count();
    criterion_10_coloring_optimization();
    criterion_11_sphericity_trend();
    criterion_12_reproducibility(cli);

    std::printf("----\n%d of 12 criteria failed\n", g_failures);
    for (const auto& n : g_notes) std::printf("note: %s\n", n.c_str());
    return g_failures;
}
