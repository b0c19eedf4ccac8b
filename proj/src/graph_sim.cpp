#include "csplab/graph_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <queue>
#include <unordered_map>

#include "csplab/rng.hpp"
#include "csplab/stats.hpp"
#include "json.hpp"

namespace csplab {

namespace {

double log_binom(int n, int r) {
    return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

bool clause_satisfied(const ClauseTable& table,
                      const FactorGraphInstance::Clause& cl, std::uint32_t x) {
    std::uint32_t idx = 0;
    for (std::size_t j = 0; j < cl.vars.size(); ++j)
        idx |= ((x >> cl.vars[j]) & 1u) << j;
    return table.values[idx] != 0.0;
}

// distance-r boundary via BFS on the variable graph (clauses as cliques)
std::vector<int> boundary_set(int n, const std::vector<std::vector<int>>& adj,
                              int var, int radius) {
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[var] = 0;
    q.push(var);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : adj[u])
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
    }
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
        if (j != var && (dist[j] < 0 || dist[j] >= radius)) out.push_back(j);
    return out;
}

// exact TV between joint law of (value-at-var, boundary restriction) and the
// product of marginals, from an enumerated solution list
template <typename ValueAt, typename BoundaryKey>
double tv_from_solutions(std::size_t n_solutions, int n_values,
                         ValueAt value_at, BoundaryKey boundary_key) {
    if (n_solutions == 0) return 0.0;
    std::unordered_map<std::string, std::vector<double>> joint;
    std::vector<double> marginal(n_values, 0.0);
    for (std::size_t s = 0; s < n_solutions; ++s) {
        int v = value_at(s);
        auto& cell = joint[boundary_key(s)];
        if (cell.empty()) cell.assign(n_values, 0.0);
        cell[v] += 1.0;
        marginal[v] += 1.0;
    }
    const double z = static_cast<double>(n_solutions);
    double tv = 0.0;
    for (const auto& [key, counts] : joint) {
        double group = 0.0;
        for (double c : counts) group += c;
        for (int v = 0; v < n_values; ++v)
            tv += std::abs(counts[v] / z - (marginal[v] / z) * (group / z));
    }
    return 0.5 * tv;
}

}  // namespace

FactorGraphInstance sample_instance(const ClauseDistribution& dist, int n,
                                    double alpha, std::uint64_t seed) {
    if (n < 1) throw validation_error("instance needs n >= 1");
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
    dist.validate();
    Rng rng(seed, /*purpose=*/4, 0);
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& wc : dist.support) cum.push_back(acc += wc.weight);
    cum.back() = 1.0;

    FactorGraphInstance inst;
    inst.n = n;
    inst.alpha = alpha;
    const auto m = static_cast<std::size_t>(std::llround(alpha * n));
    inst.empirical_clause_freq.assign(dist.support.size(), 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        FactorGraphInstance::Clause cl;
        double u = rng.next_double();
        cl.dist_index = static_cast<std::int32_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        cl.vars.resize(dist.k);
        for (int j = 0; j < dist.k; ++j)
            cl.vars[j] = static_cast<std::int32_t>(rng.next_below(n));
        inst.empirical_clause_freq[cl.dist_index] += 1.0;
        inst.clauses.push_back(std::move(cl));
    }
    if (m > 0)
        for (auto& f : inst.empirical_clause_freq) f /= static_cast<double>(m);
    return inst;
}

ColoringInstance sample_coloring_instance(int n, int q, double alpha,
                                          std::uint64_t seed) {
    if (n < 2) throw validation_error("coloring instance needs n >= 2");
    if (q < 2) throw validation_error("coloring instance needs q >= 2");
    Rng rng(seed, /*purpose=*/5, 0);
    ColoringInstance inst;
    inst.n = n;
    inst.q = q;
    const auto m = static_cast<std::size_t>(std::llround(alpha * n));
    for (std::size_t e = 0; e < m; ++e) {
        // uniform over unordered distinct pairs, with replacement across edges
        auto u = static_cast<std::int32_t>(rng.next_below(n));
        auto v = static_cast<std::int32_t>(rng.next_below(n - 1));
        if (v >= u) ++v;
        inst.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    return inst;
}

SolutionStats solve_exhaustive(const ClauseDistribution& dist,
                               const FactorGraphInstance& inst,
                               bool keep_solutions) {
    if (inst.n > 30)
        throw size_cap_error("exhaustive binary solve capped at n = 30");
    SolutionStats st;
    const std::uint64_t space = 1ull << inst.n;
    const int n = inst.n;
    for (std::uint64_t x = 0; x < space; ++x) {
        bool sat = true;
        for (const auto& cl : inst.clauses) {
            if (!clause_satisfied(dist.support[cl.dist_index].clause, cl,
                                  static_cast<std::uint32_t>(x))) {
                sat = false;
                break;
            }
        }
        if (!sat) continue;
        ++st.z;
        int pop = std::popcount(x);
        if (std::abs(2 * pop - n) <= 1) ++st.z_b;
        if (keep_solutions && st.solutions.size() < 1000000u)
            st.solutions.push_back(static_cast<std::uint32_t>(x));
    }
    st.solutions_materialized = keep_solutions && st.z <= 1000000u;
    if (!st.solutions_materialized) st.solutions.clear();
    return st;
}

SolutionStats solve_exhaustive(const ColoringInstance& inst,
                               bool keep_solutions) {
    double space = std::pow(static_cast<double>(inst.q), inst.n);
    if (space > 1e8)
        throw size_cap_error("exhaustive coloring solve capped at q^n = 1e8");
    // materialized colorings are packed 2 bits per vertex into 32 bits
    const bool packable = inst.q <= 4 && inst.n <= 16;
    keep_solutions = keep_solutions && packable;
    SolutionStats st;
    st.mean_color_freq.assign(inst.q, 0.0);
    std::vector<std::int8_t> color(inst.n, 0);
    const std::uint64_t total = static_cast<std::uint64_t>(space);
    for (std::uint64_t it = 0; it < total; ++it) {
        bool proper = true;
        for (const auto& [u, v] : inst.edges)
            if (color[u] == color[v]) {
                proper = false;
                break;
            }
        if (proper) {
            ++st.z;
            for (int i = 0; i < inst.n; ++i)
                st.mean_color_freq[color[i]] += 1.0;
            if (keep_solutions && st.solutions.size() < 1000000u) {
                std::uint32_t packed = 0;
                for (int i = 0; i < inst.n; ++i)
                    packed |= static_cast<std::uint32_t>(color[i]) << (2 * i);
                st.solutions.push_back(packed);
            }
        }
        // mixed-radix increment
        for (int i = 0; i < inst.n; ++i) {
            if (++color[i] < inst.q) break;
            color[i] = 0;
        }
    }
    if (st.z > 0)
        for (auto& f : st.mean_color_freq)
            f /= static_cast<double>(st.z) * inst.n;
    st.solutions_materialized = keep_solutions && st.z <= 1000000u;
    if (!st.solutions_materialized) st.solutions.clear();
    return st;
}

double expected_z(const ClauseDistribution& dist, int n, double alpha) {
    if (n < 1 || n > 10000)
        throw validation_error("expected_z supports 1 <= n <= 1e4");
    const auto m = static_cast<double>(std::llround(alpha * n));
    double best = -kInf;
    std::vector<double> logs(n + 1);
    for (int j = 0; j <= n; ++j) {
        double theta = (2.0 * j - n) / n;
        double mean_nsq = 0.0;
        for (const auto& wc : dist.support)
            mean_nsq += wc.weight * norm_sq_theta(wc.clause, theta);
        double lg = mean_nsq > 0.0
                        ? log_binom(n, j) + m * std::log(mean_nsq)
                        : (m > 0 ? -kInf : log_binom(n, j));
        logs[j] = lg;
        best = std::max(best, lg);
    }
    if (best == -kInf) return 0.0;
    double acc = 0.0;
    for (double lg : logs)
        if (lg > -kInf) acc += std::exp(lg - best);
    return std::exp(best) * acc;
}

OverlapStats overlap_stats(const ClauseDistribution& dist,
                           const FactorGraphInstance& inst,
                           std::size_t n_pairs, std::uint64_t seed) {
    auto st = solve_exhaustive(dist, inst, true);
    OverlapStats out;
    out.satisfiable = st.z > 0;
    if (!out.satisfiable) return out;
    if (!st.solutions_materialized)
        throw size_cap_error("overlap stats need a materialized solution list");

    const int n = inst.n;
    std::map<std::int64_t, std::uint64_t> hist;  // key: x1 . x2 in [-n, n]
    Accumulator acc;
    auto record = [&](std::uint32_t a, std::uint32_t b) {
        int agree = n - std::popcount(a ^ b);
        std::int64_t dot = 2 * agree - n;
        ++hist[dot];
        acc.add(static_cast<double>(dot) / n);
    };
    const std::uint64_t z = st.z;
    if (z * z <= 1000000ull) {
        for (std::uint32_t a : st.solutions)
            for (std::uint32_t b : st.solutions) record(a, b);
        out.n_pairs = z * z;
    } else {
        Rng rng(seed, /*purpose=*/6, 0);
        for (std::size_t p = 0; p < n_pairs; ++p)
            record(st.solutions[rng.next_below(z)],
                   st.solutions[rng.next_below(z)]);
        out.n_pairs = n_pairs;
    }
    for (const auto& [dot, count] : hist)
        out.overlap_histogram.emplace_back(static_cast<double>(dot) / n, count);
    out.mean_overlap = acc.mean();
    out.se_overlap = acc.std_error();
    return out;
}

OverlapStats overlap_stats(const ColoringInstance& inst, std::size_t n_pairs,
                           std::uint64_t seed) {
    auto st = solve_exhaustive(inst, true);
    OverlapStats out;
    out.satisfiable = st.z > 0;
    if (!out.satisfiable) return out;
    if (!st.solutions_materialized)
        throw size_cap_error("overlap stats need a materialized solution list");

    const int n = inst.n, q = inst.q;
    const double flat = 1.0 / (q * q);
    auto color_of = [&](std::uint32_t packed, int i) {
        return static_cast<int>((packed >> (2 * i)) & 3u);
    };

    // exact E ||nu - flat||^2 over independent uniform pairs from the
    // color-agreement matrix B(t,t') = P(x_t = x_t'):
    //   E sum nu^2 = n^-2 sum_{t,t'} B(t,t')^2, and E||nu-flat||^2 = that - 1/q^2.
    {
        std::vector<double> agree(static_cast<std::size_t>(n) * n, 0.0);
        for (std::uint32_t sol : st.solutions)
            for (int t = 0; t < n; ++t) {
                int ct = color_of(sol, t);
                for (int u = 0; u < n; ++u)
                    if (color_of(sol, u) == ct)
                        agree[static_cast<std::size_t>(t) * n + u] += 1.0;
            }
        double sum_b2 = 0.0;
        const double z = static_cast<double>(st.z);
        for (double a : agree) sum_b2 += (a / z) * (a / z);
        out.exact_mean_type_dev = sum_b2 / (static_cast<double>(n) * n) - 1.0 / (q * q);
    }

    Rng rng(seed, /*purpose=*/7, 0);
    Accumulator dev, row_dev, col_dev;
    std::vector<double> nu(static_cast<std::size_t>(q) * q);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        std::uint32_t a = st.solutions[rng.next_below(st.z)];
        std::uint32_t b = st.solutions[rng.next_below(st.z)];
        std::fill(nu.begin(), nu.end(), 0.0);
        for (int i = 0; i < n; ++i)
            nu[static_cast<std::size_t>(color_of(a, i)) * q + color_of(b, i)] +=
                1.0 / n;
        double d = 0.0;
        for (double v : nu) d += (v - flat) * (v - flat);
        out.type_dev_samples.push_back(d);
        dev.add(d);
        double rd = 0.0, cd = 0.0;
        for (int i = 0; i < q; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < q; ++j) {
                r += nu[static_cast<std::size_t>(i) * q + j];
                c += nu[static_cast<std::size_t>(j) * q + i];
            }
            rd += (r - 1.0 / q) * (r - 1.0 / q);
            cd += (c - 1.0 / q) * (c - 1.0 / q);
        }
        row_dev.add(rd);
        col_dev.add(cd);
    }
    out.n_pairs = n_pairs;
    out.mean_type_dev = dev.mean();
    out.mean_row_marginal_dev = row_dev.mean();
    out.mean_col_marginal_dev = col_dev.mean();
    return out;
}

double correlation_decay(const ClauseDistribution& dist,
                         const FactorGraphInstance& inst, int var, int radius) {
    if (var < 0 || var >= inst.n) throw validation_error("variable out of range");
    if (radius < 1) throw validation_error("radius must be >= 1");
    auto st = solve_exhaustive(dist, inst, true);
    if (!st.solutions_materialized)
        throw size_cap_error("correlation decay needs a materialized solution list");
    if (st.z == 0) return 0.0;

    std::vector<std::vector<int>> adj(inst.n);
    for (const auto& cl : inst.clauses)
        for (std::size_t a = 0; a < cl.vars.size(); ++a)
            for (std::size_t b = a + 1; b < cl.vars.size(); ++b)
                if (cl.vars[a] != cl.vars[b]) {
                    adj[cl.vars[a]].push_back(cl.vars[b]);
                    adj[cl.vars[b]].push_back(cl.vars[a]);
                }
    auto boundary = boundary_set(inst.n, adj, var, radius);
    if (boundary.empty()) return 0.0;

    return tv_from_solutions(
        st.solutions.size(), 2,
        [&](std::size_t s) { return (st.solutions[s] >> var) & 1u; },
        [&](std::size_t s) {
            std::string key(boundary.size(), '0');
            for (std::size_t i = 0; i < boundary.size(); ++i)
                key[i] = static_cast<char>('0' + ((st.solutions[s] >> boundary[i]) & 1u));
            return key;
        });
}

double correlation_decay(const ColoringInstance& inst, int var, int radius) {
    if (var < 0 || var >= inst.n) throw validation_error("vertex out of range");
    if (radius < 1) throw validation_error("radius must be >= 1");
    auto st = solve_exhaustive(inst, true);
    if (!st.solutions_materialized)
        throw size_cap_error("correlation decay needs a materialized solution list");
    if (st.z == 0) return 0.0;

    std::vector<std::vector<int>> adj(inst.n);
    for (const auto& [u, v] : inst.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    auto boundary = boundary_set(inst.n, adj, var, radius);
    if (boundary.empty()) return 0.0;

    return tv_from_solutions(
        st.solutions.size(), inst.q,
        [&](std::size_t s) {
            return static_cast<int>((st.solutions[s] >> (2 * var)) & 3u);
        },
        [&](std::size_t s) {
            std::string key(boundary.size(), '0');
            for (std::size_t i = 0; i < boundary.size(); ++i)
                key[i] = static_cast<char>(
                    '0' + ((st.solutions[s] >> (2 * boundary[i])) & 3u));
            return key;
        });
}

FactorGraphInstance FactorGraphInstance::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("instance JSON parse error: ") + e.what());
    }
    FactorGraphInstance inst;
    inst.n = j.at("n").get<int>();
    inst.alpha = j.at("alpha").get<double>();
    for (const auto& c : j.at("clauses")) {
        Clause cl;
        cl.dist_index = c.at("dist_index").get<std::int32_t>();
        cl.vars = c.at("vars").get<std::vector<std::int32_t>>();
        for (auto v : cl.vars)
            if (v < 0 || v >= inst.n)
                throw validation_error("clause variable index out of range");
        inst.clauses.push_back(std::move(cl));
    }
    return inst;
}

std::string FactorGraphInstance::to_json_text() const {
    nlohmann::json j;
    j["n"] = n;
    j["alpha"] = alpha;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& cl : clauses)
        arr.push_back({{"dist_index", cl.dist_index}, {"vars", cl.vars}});
    j["clauses"] = std::move(arr);
    return j.dump();
}

ColoringInstance ColoringInstance::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("instance JSON parse error: ") + e.what());
    }
    ColoringInstance inst;
    inst.n = j.at("n").get<int>();
    inst.q = j.at("q").get<int>();
    for (const auto& e : j.at("edges")) {
        auto u = e.at(0).get<std::int32_t>();
        auto v = e.at(1).get<std::int32_t>();
        if (u == v) throw validation_error("self-loop in coloring instance");
        if (u < 0 || v < 0 || u >= inst.n || v >= inst.n)
            throw validation_error("edge endpoint out of range");
        inst.edges.emplace_back(u, v);
    }
    return inst;
}

std::string ColoringInstance::to_json_text() const {
    nlohmann::json j;
    j["n"] = n;
    j["q"] = q;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [u, v] : edges) arr.push_back({u, v});
    j["edges"] = std::move(arr);
    return j.dump();
}

}  // namespace csplab
