#include "csplab/tree_sim.hpp"

#include <array>
#include <cmath>

#include "csplab/parallel.hpp"
#include "csplab/stats.hpp"

namespace csplab {

namespace {

constexpr double kFrozenTol = 1e-9;

struct SupportSampler {
    // cumulative clause weights plus per-clause partial solution sets
    std::vector<double> cum;
    std::vector<PartialSets> sets;
    std::vector<const std::vector<double>*> tables;
    int k;
    // chance that one clause freezes its parent, by parent sign:
    // E_c |Lambda^v(c)| / |S^v(c)|
    double p_freeze[2] = {0.0, 0.0};

    explicit SupportSampler(const ClauseDistribution& dist) : k(dist.k) {
        dist.validate();
        double acc = 0.0;
        for (const auto& wc : dist.support) {
            acc += wc.weight;
            cum.push_back(acc);
            sets.push_back(partial_sets(wc.clause));
            tables.push_back(&wc.clause.values);
            const auto& ps = sets.back();
            if (ps.s_plus.empty() || ps.s_minus.empty())
                throw validation_error(
                    "broadcast requires feasible clauses (empty partial set)");
            p_freeze[1] += wc.weight * ps.lambda_plus.size() / ps.s_plus.size();
            p_freeze[0] += wc.weight * ps.lambda_minus.size() / ps.s_minus.size();
        }
        cum.back() = 1.0;
    }

    std::size_t draw_clause(Rng& rng) const {
        double u = rng.next_double();
        if (cum.size() <= 8) {
            std::size_t i = 0;
            while (i + 1 < cum.size() && cum[i] < u) ++i;
            return i;
        }
        std::size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cum[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::uint32_t draw_partial(Rng& rng, std::size_t clause, int parent_value) const {
        const auto& s = parent_value > 0 ? sets[clause].s_plus
                                         : sets[clause].s_minus;
        return s[rng.next_below(s.size())];
    }
};

struct NodeBudget {
    std::uint64_t used = 0;
    std::uint64_t cap = 0;
    void charge(std::uint64_t n) {
        used += n;
        if (used > cap)
            throw size_cap_error("tree node budget exceeded (" +
                                 std::to_string(cap) + " nodes)");
    }
};

// Messages of one variable toward its parent, one pair per conditioning
// level l in (gen, depth]; msg[l][0] is the +1 weight, msg[l][1] the -1.
struct LevelMessages {
    int first_level = 0;
    std::vector<std::array<double, 2>> m;
};

}  // namespace

TreeInstance sample_tree(const ClauseDistribution& dist, double alpha, int depth,
                         std::uint64_t seed) {
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
    if (depth < 0) throw validation_error("depth must be >= 0");
    const int k = dist.k;
    NodeBudget budget{0, max_tree_nodes()};

    // refuse upfront when the expected size is already over the cap
    double expect = 1.0, gen_size = 1.0;
    for (int g = 0; g < depth; ++g) {
        gen_size *= k * alpha * (k - 1);
        expect += gen_size * (1.0 + 1.0 / (k - 1));
        if (expect > static_cast<double>(budget.cap))
            throw size_cap_error("expected tree size exceeds the node budget");
    }

    Rng rng(seed, /*purpose=*/1, 0);
    SupportSampler sampler(dist);

    TreeInstance t;
    t.k = k;
    t.depth = depth;
    t.alpha = alpha;
    t.vars.push_back({-1, 0, 0, 0});
    budget.charge(1);

    std::size_t frontier_begin = 0, frontier_end = 1;
    for (int g = 0; g < depth; ++g) {
        for (std::size_t vi = frontier_begin; vi < frontier_end; ++vi) {
            std::uint64_t eta = poisson(rng, k * alpha);
            t.vars[vi].first_factor = static_cast<std::int32_t>(t.factors.size());
            t.vars[vi].num_factors = static_cast<std::int32_t>(eta);
            budget.charge(eta * static_cast<std::uint64_t>(k));  // factor + k-1 vars
            for (std::uint64_t e = 0; e < eta; ++e) {
                TreeInstance::FactorNode f;
                f.parent_var = static_cast<std::int32_t>(vi);
                f.clause_index = static_cast<std::int32_t>(sampler.draw_clause(rng));
                f.first_child = static_cast<std::int32_t>(t.vars.size());
                t.factors.push_back(f);
                for (int c = 0; c < k - 1; ++c)
                    t.vars.push_back({static_cast<std::int32_t>(t.factors.size() - 1),
                                      static_cast<std::int16_t>(g + 1), 0, 0});
            }
        }
        frontier_begin = frontier_end;
        frontier_end = t.vars.size();
    }
    t.root_degree = t.vars[0].num_factors;
    return t;
}

BroadcastSample broadcast(const ClauseDistribution& dist, const TreeInstance& tree,
                          int root_value, std::uint64_t seed) {
    if (root_value != 1 && root_value != -1)
        throw validation_error("root value must be +1 or -1");
    SupportSampler sampler(dist);
    Rng rng(seed, /*purpose=*/2, 0);

    BroadcastSample s;
    s.root_value = root_value;
    s.values.assign(tree.vars.size(), 0);
    s.values[0] = static_cast<std::int8_t>(root_value);
    // factors are stored in creation order, parents before children
    for (std::size_t fi = 0; fi < tree.factors.size(); ++fi) {
        const auto& f = tree.factors[fi];
        int pv = s.values[f.parent_var];
        std::uint32_t y = sampler.draw_partial(rng, f.clause_index, pv);
        for (int c = 0; c < tree.k - 1; ++c)
            s.values[f.first_child + c] =
                static_cast<std::int8_t>((y >> c) & 1u ? +1 : -1);
    }
    for (std::size_t vi = 0; vi < tree.vars.size(); ++vi)
        if (tree.vars[vi].generation == tree.depth)
            s.leaf_slice.push_back(s.values[vi]);
    return s;
}

BiasResult root_bias(const ClauseDistribution& dist, const TreeInstance& tree,
                     const std::vector<std::int8_t>& leaf_values) {
    // variable messages, processed children-first (reverse BFS order)
    std::vector<std::array<double, 2>> msg(tree.vars.size(), {1.0, 1.0});
    double log_scale = 0.0;

    std::size_t leaf_cursor = 0;
    for (std::size_t vi = 0; vi < tree.vars.size(); ++vi) {
        if (tree.vars[vi].generation == tree.depth && tree.depth > 0) {
            if (leaf_cursor >= leaf_values.size())
                throw validation_error("leaf assignment shorter than leaf slice");
            msg[vi] = leaf_values[leaf_cursor] > 0
                          ? std::array<double, 2>{1.0, 0.0}
                          : std::array<double, 2>{0.0, 1.0};
            ++leaf_cursor;
        }
    }
    if (tree.depth > 0 && leaf_cursor != leaf_values.size())
        throw validation_error("leaf assignment longer than leaf slice");

    const int km1 = tree.k - 1;
    for (std::size_t ri = tree.vars.size(); ri-- > 0;) {
        const auto& v = tree.vars[ri];
        for (std::int32_t e = 0; e < v.num_factors; ++e) {
            const auto& f = tree.factors[v.first_factor + e];
            const auto& table = dist.support[f.clause_index].clause.values;
            double m[2] = {0.0, 0.0};
            for (std::uint32_t y = 0; y < (1u << km1); ++y) {
                double p = 1.0;
                for (int c = 0; c < km1; ++c)
                    p *= msg[f.first_child + c][(y >> c) & 1u ? 0 : 1];
                if (p == 0.0) continue;
                m[0] += table[(y << 1) | 1u] * p;
                m[1] += table[y << 1] * p;
            }
            msg[ri][0] *= m[0];
            msg[ri][1] *= m[1];
            double sum = msg[ri][0] + msg[ri][1];
            if (sum <= 0.0)
                throw validation_error("inconsistent leaf assignment");
            msg[ri][0] /= sum;
            msg[ri][1] /= sum;
            log_scale += std::log(sum);
        }
    }

    BiasResult r;
    double wp = msg[0][0], wm = msg[0][1];
    if (tree.depth == 0) {
        // the root itself is the observed slice
        if (leaf_values.size() != 1)
            throw validation_error("depth-0 tree expects a single leaf value");
        wp = leaf_values[0] > 0 ? 1.0 : 0.0;
        wm = 1.0 - wp;
    }
    r.h = (wp - wm) / (wp + wm);
    r.plus_compatible = wp > kFrozenTol * (wp + wm);
    r.minus_compatible = wm > kFrozenTol * (wp + wm);
    r.log_scale = log_scale;
    return r;
}

namespace {

// One sample of the fused broadcast + message recursion. Returns messages
// for every conditioning level in (gen, depth]; the caller of the root reads
// off h_l for l = 1..depth. Child message buffers are preallocated per
// generation so the recursion does no per-node allocation.
struct FusedEngine {
    const SupportSampler& sampler;
    int depth;
    PoissonSampler degree;
    NodeBudget& budget;
    Rng& rng;
    std::vector<std::vector<LevelMessages>> scratch;  // [child generation][c]

    double open_cache[2][64];  // (1 - p_freeze)^eta for small eta

    FusedEngine(const SupportSampler& s, int d, double rate, NodeBudget& b,
                Rng& r)
        : sampler(s), depth(d), degree(rate), budget(b), rng(r),
          scratch(d + 1, std::vector<LevelMessages>(s.k - 1)) {
        for (int v = 0; v < 2; ++v) {
            open_cache[v][0] = 1.0;
            for (int e = 1; e < 64; ++e)
                open_cache[v][e] = open_cache[v][e - 1] * (1.0 - s.p_freeze[v]);
        }
    }

    double open_pow(int v, std::uint64_t eta) const {
        if (eta < 64) return open_cache[v][eta];
        return std::pow(1.0 - sampler.p_freeze[v], static_cast<double>(eta));
    }

    void run(int gen, int value, LevelMessages& out) {
        const int km1 = sampler.k - 1;
        out.first_level = gen + 1;
        if (gen + 1 == depth) {
            // Children are leaves, so the subtree contributes only through
            // the freeze indicator; a clause freezes with probability
            // |Lambda|/|S| independently, giving Bernoulli(1-(1-p)^eta).
            std::uint64_t eta = degree(rng);
            budget.charge(1 + eta * static_cast<std::uint64_t>(km1 + 1));
            bool frozen = false;
            if (eta > 0) {
                double open = open_pow(value > 0 ? 1 : 0, eta);
                frozen = rng.next_double() >= open;
            }
            out.m.assign(1, value > 0
                                ? std::array<double, 2>{1.0, frozen ? 0.0 : 1.0}
                                : std::array<double, 2>{frozen ? 0.0 : 1.0, 1.0});
            return;
        }
        out.m.assign(depth - gen, {1.0, 1.0});
        std::uint64_t eta = degree(rng);
        budget.charge(1 + eta);
        for (std::uint64_t e = 0; e < eta; ++e) {
            std::size_t ci = sampler.draw_clause(rng);
            std::uint32_t y = sampler.draw_partial(rng, ci, value);
            const auto& table = *sampler.tables[ci];
            // level gen+1: the factor's children are the observed slice
            out.m[0][0] *= table[(y << 1) | 1u];
            out.m[0][1] *= table[y << 1];
            auto& child = scratch[gen + 1];
            for (int c = 0; c < km1; ++c)
                run(gen + 1, (y >> c) & 1u ? +1 : -1, child[c]);
            for (int lvl = gen + 2; lvl <= depth; ++lvl) {
                const int li = lvl - (gen + 2);  // child message index
                double m[2] = {0.0, 0.0};
                for (std::uint32_t z = 0; z < (1u << km1); ++z) {
                    double p = 1.0;
                    for (int c = 0; c < km1; ++c)
                        p *= child[c].m[li][(z >> c) & 1u ? 0 : 1];
                    if (p == 0.0) continue;
                    m[0] += table[(z << 1) | 1u] * p;
                    m[1] += table[z << 1] * p;
                }
                out.m[lvl - out.first_level][0] *= m[0];
                out.m[lvl - out.first_level][1] *= m[1];
            }
            // normalize all levels after each factor to keep weights bounded
            for (auto& pair : out.m) {
                double s = pair[0] + pair[1];
                if (s <= 0.0) throw validation_error("fused recursion: zero weight");
                double inv = 1.0 / s;
                pair[0] *= inv;
                pair[1] *= inv;
            }
        }
    }
};

struct LevelAccumulators {
    Accumulator abs_h, h_plus, z, d1, d2;

    void add_sample(double h) {
        abs_h.add(std::abs(h));
        h_plus.add(h);
        z.add(h >= 1.0 - 2.0 * kFrozenTol ? 1.0 : 0.0);
        d1.add(h - h * h);
        double ratio = h >= 1.0 - 2.0 * kFrozenTol
                           ? 0.0
                           : std::sqrt((1.0 - h) / (1.0 + h));
        d2.add(ratio - std::sqrt(std::max(0.0, 1.0 - h * h)));
    }
    void merge(const LevelAccumulators& o) {
        abs_h.merge(o.abs_h);
        h_plus.merge(o.h_plus);
        z.merge(o.z);
        d1.merge(o.d1);
        d2.merge(o.d2);
    }
};

}  // namespace

std::vector<ReconStats> reconstruction_sweep(const ClauseDistribution& dist,
                                             double alpha, int depth,
                                             std::size_t n_samples,
                                             std::uint64_t seed, int workers,
                                             std::vector<double>* h_samples_deepest) {
    if (depth < 1) throw validation_error("reconstruction sweep needs depth >= 1");
    if (n_samples < 1) throw validation_error("need at least one sample");
    SupportSampler sampler(dist);
    const std::uint64_t cap = max_tree_nodes();

    const std::size_t chunk = 256;
    const std::size_t n_chunks = (n_samples + chunk - 1) / chunk;
    std::vector<std::vector<LevelAccumulators>> per_chunk(
        n_chunks, std::vector<LevelAccumulators>(depth));
    std::vector<std::vector<double>> deepest(n_chunks);

    parallel_chunks(n_samples, workers, chunk,
                    [&](std::size_t c, std::size_t b, std::size_t e) {
        auto& acc = per_chunk[c];
        for (std::size_t i = b; i < e; ++i) {
            Rng rng(seed, /*purpose=*/3, i);
            NodeBudget budget{0, cap};
            FusedEngine engine{sampler, depth, dist.k * alpha, budget, rng};
            LevelMessages root;
            engine.run(0, +1, root);
            for (int lvl = 1; lvl <= depth; ++lvl) {
                const auto& m = root.m[lvl - 1];
                double h = (m[0] - m[1]) / (m[0] + m[1]);
                acc[lvl - 1].add_sample(h);
                if (lvl == depth && h_samples_deepest)
                    deepest[c].push_back(h);
            }
        }
    });

    std::vector<LevelAccumulators> total(depth);
    for (std::size_t c = 0; c < n_chunks; ++c) {
        for (int l = 0; l < depth; ++l) total[l].merge(per_chunk[c][l]);
        if (h_samples_deepest)
            h_samples_deepest->insert(h_samples_deepest->end(),
                                      deepest[c].begin(), deepest[c].end());
    }

    std::vector<ReconStats> rows(depth);
    for (int l = 0; l < depth; ++l) {
        auto& r = rows[l];
        r.alpha = alpha;
        r.depth = l + 1;
        r.n_samples = n_samples;
        r.mean_abs_h = total[l].abs_h.mean();
        r.se_abs_h = total[l].abs_h.std_error();
        r.mean_h_plus = total[l].h_plus.mean();
        r.se_h_plus = total[l].h_plus.std_error();
        r.z_rate = total[l].z.mean();
        r.se_z = total[l].z.std_error();
        r.mean_d1 = total[l].d1.mean();
        r.se_d1 = total[l].d1.std_error();
        r.mean_d2 = total[l].d2.mean();
        r.se_d2 = total[l].d2.std_error();
    }
    return rows;
}

ReconStats reconstruction_estimate(const ClauseDistribution& dist, double alpha,
                                   int depth, std::size_t n_samples,
                                   std::uint64_t seed, int workers) {
    return reconstruction_sweep(dist, alpha, depth, n_samples, seed, workers)
        .back();
}

ConsistencyReport consistency_diagnostics(const std::vector<double>& h_samples) {
    if (h_samples.empty())
        throw validation_error("consistency diagnostics need samples");
    ConsistencyReport rep;
    Accumulator d1, d2;
    for (double x : h_samples) {
        if (!(x >= -1.0 && x <= 1.0))
            throw validation_error("bias samples must lie in [-1,1]");
        d1.add(x - x * x);
        double ratio =
            x >= 1.0 - 2.0 * kFrozenTol ? 0.0 : std::sqrt((1.0 - x) / (1.0 + x));
        d2.add(ratio - std::sqrt(std::max(0.0, 1.0 - x * x)));
    }
    rep.n = d1.n;
    rep.mean_x_minus_x2 = d1.mean();
    rep.se_x_minus_x2 = d1.std_error();
    rep.mean_ratio_gap = d2.mean();
    rep.se_ratio_gap = d2.std_error();
    auto ok = [](double m, double se) {
        return std::abs(m) <= 3.0 * se + 1e-12;
    };
    rep.pass_3sigma = ok(rep.mean_x_minus_x2, rep.se_x_minus_x2) &&
                      ok(rep.mean_ratio_gap, rep.se_ratio_gap);
    return rep;
}

}  // namespace csplab
