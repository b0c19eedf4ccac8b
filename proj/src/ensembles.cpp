#include "csplab/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "csplab/rng.hpp"
#include "json.hpp"

namespace csplab {

namespace {

double binom(int n, int r) {
    double v = 1.0;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

ClauseTable hyp2col_table(int k) {
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> v(n, 1.0);
    v[0] = 0.0;       // all -1
    v[n - 1] = 0.0;   // all +1
    return ClauseTable(k, std::move(v));
}

// NAE clause for sign pattern s: zero exactly when x equals s or -s.
ClauseTable nae_table(int k, std::uint32_t s) {
    const std::uint32_t full = static_cast<std::uint32_t>((1ull << k) - 1);
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> v(n, 1.0);
    v[s] = 0.0;
    v[(~s) & full] = 0.0;
    return ClauseTable(k, std::move(v));
}

ClauseTable xor_table(int k, int eps) {
    // (1 + eps * prod x_i) / 2 as a 0/1 table; each -1 coordinate flips the
    // product, so prod = (-1)^(k - popcount).
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> v(n);
    for (std::size_t m = 0; m < n; ++m) {
        int prod = ((k - std::popcount(m)) & 1) ? -1 : +1;
        v[m] = (1 + eps * prod) / 2;
    }
    return ClauseTable(k, std::move(v));
}

// phi^pi with (phi^pi)(x_1..x_k) = phi(x_pi(1)..x_pi(k)); pi is 0-based here.
std::vector<double> permute_table(const std::vector<double>& in, int k,
                                  const std::vector<int>& pi) {
    std::vector<double> out(in.size());
    for (std::uint32_t m = 0; m < in.size(); ++m) {
        std::uint32_t src = 0;
        for (int i = 0; i < k; ++i)
            if ((m >> pi[i]) & 1u) src |= 1u << i;
        // bit i of src is bit pi(i) of m, so in[src] evaluates phi at permuted args
        out[m] = in[src];
    }
    return out;
}

}  // namespace

void ClauseDistribution::validate() const {
    if (support.empty()) throw validation_error("distribution has empty support");
    double total = 0.0;
    for (const auto& wc : support) {
        if (wc.clause.k != k)
            throw validation_error("distribution mixes different arities");
        if (!wc.clause.is_boolean())
            throw validation_error("support clauses must be Boolean tables");
        if (!(wc.weight > 0.0))
            throw validation_error("clause weights must be positive");
        total += wc.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw validation_error("clause weights must sum to 1 (got " +
                               std::to_string(total) + ")");
}

double ClauseDistribution::expect(const std::vector<double>& per_clause) const {
    CompensatedSum s;
    for (std::size_t i = 0; i < support.size(); ++i)
        s.add(support[i].weight * per_clause[i]);
    return s.value();
}

double ClauseDistribution::mean_log_norm_sq_theta(double theta) const {
    CompensatedSum s;
    for (const auto& wc : support) {
        double nsq = norm_sq_theta(wc.clause, theta);
        if (nsq <= 0.0) return -kInf;
        s.add(wc.weight * std::log(nsq));
    }
    return s.value();
}

double ClauseDistribution::mean_log_norm_sq() const {
    return mean_log_norm_sq_theta(0.0);
}

ClauseDistribution builtin(const std::string& name, int k) {
    if (k < 2) throw validation_error("builtin ensembles need k >= 2");
    if (k > kMaxArity) throw validation_error("k exceeds the exact-table cap");
    ClauseDistribution d;
    d.k = k;
    d.name = name;
    if (name == "hyp2col") {
        d.support.push_back({hyp2col_table(k), 1.0});
    } else if (name == "nae") {
        if (k <= 12) {
            const std::uint32_t n = 1u << k;
            const double w = 1.0 / static_cast<double>(n);
            d.support.reserve(n);
            for (std::uint32_t s = 0; s < n; ++s)
                d.support.push_back({nae_table(k, s), w});
        } else {
            // One representative per popcount class of the sign pattern,
            // binomial weights. Every functional computed here is invariant
            // under the per-variable sign flips that generate the class.
            const double scale = std::pow(2.0, -k);
            for (int j = 0; j <= k; ++j) {
                std::uint32_t s = static_cast<std::uint32_t>((1ull << j) - 1);
                d.support.push_back({nae_table(k, s), binom(k, j) * scale});
            }
            d.symmetry_note =
                "sign-flip orbit collapsed to popcount classes; all orbit "
                "members share norms, influences and |coefficients|";
        }
    } else if (name == "xor") {
        if (k % 2 != 0)
            throw validation_error("xor ensemble requires even k");
        d.support.push_back({xor_table(k, +1), 0.5});
        d.support.push_back({xor_table(k, -1), 0.5});
    } else {
        throw validation_error("unknown builtin ensemble '" + name + "'");
    }
    d.validate();
    return d;
}

ClauseDistribution parse_distribution(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("distribution JSON parse error: ") +
                               e.what());
    }
    if (!j.contains("k") || !j.contains("clauses"))
        throw validation_error("distribution JSON needs fields 'k' and 'clauses'");
    ClauseDistribution d;
    d.k = j.at("k").get<int>();
    if (j.contains("name")) d.name = j.at("name").get<std::string>();
    for (const auto& c : j.at("clauses")) {
        WeightedClause wc;
        wc.clause = ClauseTable::from_truth_table(
            d.k, c.at("truth_table").get<std::string>());
        wc.weight = c.at("weight").get<double>();
        d.support.push_back(std::move(wc));
    }
    d.validate();
    return d;
}

ClauseDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open distribution file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_distribution(ss.str());
}

std::string distribution_to_json(const ClauseDistribution& dist) {
    nlohmann::json j;
    j["k"] = dist.k;
    if (!dist.name.empty()) j["name"] = dist.name;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& wc : dist.support)
        arr.push_back({{"truth_table", wc.clause.truth_table()},
                       {"weight", wc.weight}});
    j["clauses"] = std::move(arr);
    return j.dump(2);
}

ConditionReport check_conditions(const ClauseDistribution& dist,
                                 int theta_grid_size) {
    if (theta_grid_size < 3)
        throw validation_error("theta grid size must be >= 3");
    dist.validate();
    const int k = dist.k;
    ConditionReport rep;
    rep.grid_resolution = theta_grid_size;

    // Balance: phi(x) = phi(-x) for every x.
    rep.balanced.pass = true;
    for (std::size_t ci = 0; ci < dist.support.size() && rep.balanced.pass; ++ci) {
        const auto& t = dist.support[ci].clause.values;
        const std::uint32_t full = static_cast<std::uint32_t>(t.size() - 1);
        for (std::uint32_t m = 0; m < t.size(); ++m) {
            if (t[m] != t[(~m) & full]) {
                rep.balanced.pass = false;
                rep.balanced.witness = "clause " + std::to_string(ci) +
                                       ", x index " + std::to_string(m);
                break;
            }
        }
    }

    // Feasibility: every (k-1)-partial assignment in every position extends.
    rep.feasible.pass = true;
    for (std::size_t ci = 0; ci < dist.support.size() && rep.feasible.pass; ++ci) {
        const auto& t = dist.support[ci].clause.values;
        for (int i = 1; i <= k && rep.feasible.pass; ++i) {
            const std::uint32_t bit = 1u << (i - 1);
            for (std::uint32_t m = 0; m < t.size(); m += 1) {
                if (m & bit) continue;
                if (t[m] == 0.0 && t[m | bit] == 0.0) {
                    rep.feasible.pass = false;
                    rep.feasible.witness = "clause " + std::to_string(ci) +
                                           ", position " + std::to_string(i) +
                                           ", partial index " + std::to_string(m);
                    break;
                }
            }
        }
    }

    // Permutation symmetry of the weighted clause multiset.
    {
        double kfact = 1.0;
        for (int i = 2; i <= k; ++i) kfact *= i;
        bool full_check = static_cast<double>(dist.support.size()) * kfact <= 1e6;
        rep.permutation_sampled = !full_check;

        auto key_of = [](const std::vector<double>& t) {
            std::string key(t.size(), '0');
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] != 0.0) key[i] = '1';
            return key;
        };
        std::unordered_map<std::string, double> weight_by_table;
        for (const auto& wc : dist.support)
            weight_by_table[key_of(wc.clause.values)] += wc.weight;

        rep.permutation_symmetric.pass = true;
        auto check_perm = [&](const std::vector<int>& pi) {
            for (std::size_t ci = 0; ci < dist.support.size(); ++ci) {
                auto pt = permute_table(dist.support[ci].clause.values, k, pi);
                auto it = weight_by_table.find(key_of(pt));
                double w0 = weight_by_table.at(key_of(dist.support[ci].clause.values));
                double w1 = it == weight_by_table.end() ? 0.0 : it->second;
                if (std::abs(w0 - w1) > 1e-12) {
                    rep.permutation_symmetric.pass = false;
                    rep.permutation_symmetric.witness =
                        "clause " + std::to_string(ci) + " under a permutation";
                    return false;
                }
            }
            return true;
        };

        if (full_check) {
            std::vector<int> pi(k);
            std::iota(pi.begin(), pi.end(), 0);
            do {
                if (!check_perm(pi)) break;
            } while (std::next_permutation(pi.begin(), pi.end()));
        } else {
            Rng rng(0x5e5e5e5eull, 17, 0);
            std::vector<int> pi(k);
            for (int trial = 0; trial < 64 && rep.permutation_symmetric.pass;
                 ++trial) {
                std::iota(pi.begin(), pi.end(), 0);
                for (int i = k - 1; i > 0; --i)
                    std::swap(pi[i], pi[rng.next_below(i + 1)]);
                check_perm(pi);
            }
        }
    }

    // Dominance on a symmetric grid over [-1,1] including endpoints.
    {
        const double ref = dist.mean_log_norm_sq();
        rep.dominance.worst_margin = -kInf;
        for (int g = 0; g < theta_grid_size; ++g) {
            double theta = -1.0 + 2.0 * g / (theta_grid_size - 1);
            double m = dist.mean_log_norm_sq_theta(theta) - ref;
            if (m > rep.dominance.worst_margin) {
                rep.dominance.worst_margin = m;
                rep.dominance.worst_theta = theta;
            }
        }
        rep.dominance.pass = rep.dominance.worst_margin <= 1e-10;
    }

    rep.norm_floor = kInf;
    for (const auto& wc : dist.support)
        rep.norm_floor = std::min(rep.norm_floor, wc.clause.norm_sq());

    // Fourier growth / decay estimates from the position derivatives.
    rep.l1_exponent_a = -kInf;
    rep.decay_constant_C = kInf;
    rep.decay_constant_corr = kInf;
    rep.low_weight_ratio.assign(k, 0.0);
    for (const auto& wc : dist.support) {
        auto spec = fourier_transform(wc.clause);
        auto by_w = spec.energy_by_weight();
        double tail = 0.0;
        for (int j = 1; j <= k; ++j) tail += by_w[j];
        double cum = 0.0;
        for (int l = 1; l <= k; ++l) {
            cum += by_w[l];
            double r = tail > 0.0 ? cum / tail : 0.0;
            rep.low_weight_ratio[l - 1] =
                std::max(rep.low_weight_ratio[l - 1], r);
        }
        for (int i = 1; i <= k; ++i) {
            auto d = derivative(wc.clause, i);
            auto ds = fourier_transform(d);
            double l1 = 0.0;
            for (double c : ds.coeffs) l1 += std::abs(c);
            if (l1 > 0.0)
                rep.l1_exponent_a =
                    std::max(rep.l1_exponent_a, std::log(l1) / std::log(double(k)));
            double dsq = d.norm_sq();
            if (dsq <= 0.0) continue;
            for (int g = 1; g + 1 < theta_grid_size; ++g) {
                double theta = static_cast<double>(g) / (theta_grid_size - 1);
                // norm form: ||T_t d||^2 = sum c^2 t^(2|Q|)
                double norm_ratio = self_correlation(ds, theta * theta) / dsq;
                double corr_ratio = self_correlation(ds, theta) / dsq;
                double denom = k * (1.0 - theta);
                if (norm_ratio > 0.0) {
                    double c = -std::log(norm_ratio) / denom;
                    if (c < rep.decay_constant_C) {
                        rep.decay_constant_C = c;
                        rep.decay_argmin_theta = theta;
                    }
                }
                if (corr_ratio > 0.0)
                    rep.decay_constant_corr = std::min(
                        rep.decay_constant_corr, -std::log(corr_ratio) / denom);
            }
        }
    }
    return rep;
}

double omega(const ClauseDistribution& dist) {
    dist.validate();
    CompensatedSum e;
    for (const auto& wc : dist.support) {
        double i1 = influence(wc.clause, 1);
        double nsq = wc.clause.norm_sq();
        if (nsq <= 0.0) throw validation_error("clause with zero norm");
        e.add(wc.weight * (2.0 * i1 / nsq));
    }
    if (e.value() == 0.0) return kInf;
    return 1.0 / e.value();
}

double omega_hat(const ClauseDistribution& dist) {
    dist.validate();
    double e = dist.mean_log_norm_sq();
    if (e == 0.0) return kInf;  // all norms equal 1
    if (e == -kInf) throw validation_error("clause with zero norm");
    return -1.0 / e;
}

EnsembleConstants ensemble_constants(const ClauseDistribution& dist) {
    EnsembleConstants c;
    c.omega = omega(dist);
    c.omega_hat = omega_hat(dist);
    if (c.omega > c.omega_hat * (1.0 + 1e-12) + 1e-12)
        throw validation_error("ensemble constants violate omega <= omega_hat");
    return c;
}

}  // namespace csplab
