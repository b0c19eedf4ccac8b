// csplab: command-line front end for the random-CSP analysis library.
//
// Subcommands: analyze, thresholds, tree-recon, second-moment, instances,
// coloring-opt. Every run is reproducible: all randomness derives from the
// --seed value via per-sample counter streams, so outputs are byte-identical
// for a fixed (config, seed, workers) triple.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csplab/coloring_analysis.hpp"
#include "csplab/graph_sim.hpp"
#include "csplab/parallel.hpp"
#include "csplab/thresholds.hpp"
#include "csplab/tree_sim.hpp"

using nlohmann::json;
using namespace csplab;

namespace {

json tagged(double value, const char* provenance) {
    return json{{"value", value}, {"provenance", provenance}};
}

struct CommonOpts {
    std::string ensemble = "hyp2col";
    int k = 3;
    std::string dist_file;
    std::uint64_t seed = 0;
    int workers = default_workers();
    std::string out;
    std::string format = "json";
};

ClauseDistribution resolve_ensemble(const CommonOpts& c) {
    if (!c.dist_file.empty()) return load_distribution(c.dist_file);
    return builtin(c.ensemble, c.k);
}

void emit(const CommonOpts& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw validation_error("cannot open output file: " + c.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// { "alpha": a } or { "alpha_range": "a:b:step" } expanded to a sweep
std::vector<double> alpha_list(double alpha, const std::string& range) {
    if (range.empty()) return {alpha};
    double a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(range);
    if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0 || b < a)
        throw validation_error("alpha range must be a:b:step with step > 0");
    std::vector<double> out;
    for (double x = a; x <= b + 1e-12; x += step) out.push_back(x);
    return out;
}

json config_json(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw validation_error(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw validation_error("config must be a JSON object");
    return j;
}

template <typename T>
void from_config(const json& cfg, const char* key, T& var) {
    if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

void apply_common(const json& cfg, CommonOpts& c) {
    from_config(cfg, "ensemble", c.ensemble);
    from_config(cfg, "k", c.k);
    from_config(cfg, "dist_file", c.dist_file);
    from_config(cfg, "seed", c.seed);
    from_config(cfg, "workers", c.workers);
    from_config(cfg, "out", c.out);
    from_config(cfg, "format", c.format);
}

void add_common_flags(CLI::App* app, CommonOpts& c) {
    app->add_option("--ensemble", c.ensemble, "builtin family: hyp2col|nae|xor");
    app->add_option("--k", c.k, "clause arity");
    app->add_option("--dist-file", c.dist_file, "clause distribution JSON file");
    app->add_option("--seed", c.seed, "master seed (default 0)");
    app->add_option("--workers", c.workers, "worker threads");
    app->add_option("--out", c.out, "output path (stdout when empty)");
    app->add_option("--format", c.format, "json|csv");
}

json condition_json(const ConditionReport& rep) {
    json j;
    j["permutation_symmetric"] = {{"pass", rep.permutation_symmetric.pass},
                                  {"witness", rep.permutation_symmetric.witness},
                                  {"sampled", rep.permutation_sampled}};
    j["balanced"] = {{"pass", rep.balanced.pass},
                     {"witness", rep.balanced.witness}};
    j["feasible"] = {{"pass", rep.feasible.pass},
                     {"witness", rep.feasible.witness}};
    j["dominance"] = {{"pass", rep.dominance.pass},
                      {"worst_theta", rep.dominance.worst_theta},
                      {"worst_margin", rep.dominance.worst_margin}};
    j["norm_floor"] = rep.norm_floor;
    j["l1_exponent_a"] = rep.l1_exponent_a;
    j["decay_constant_C"] = rep.decay_constant_C;
    j["decay_argmin_theta"] = rep.decay_argmin_theta;
    j["decay_constant_corr"] = rep.decay_constant_corr;
    j["grid_resolution"] = rep.grid_resolution;
    j["low_weight_ratio"] = rep.low_weight_ratio;
    return j;
}

json recon_row_json(const ReconStats& r) {
    return json{{"alpha", r.alpha},
                {"depth", r.depth},
                {"n", r.n_samples},
                {"mean_abs_h", r.mean_abs_h},
                {"se_abs_h", r.se_abs_h},
                {"mean_h_plus", r.mean_h_plus},
                {"se_h_plus", r.se_h_plus},
                {"z_rate", r.z_rate},
                {"se_z", r.se_z},
                {"provenance", "monte-carlo +/- se"}};
}

void recon_row_csv(std::ostream& os, const ReconStats& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.alpha,
                  r.depth, r.n_samples, r.mean_abs_h, r.se_abs_h, r.mean_h_plus,
                  r.se_h_plus, r.z_rate, r.se_z);
    os << buf;
}

int run_analyze(const CommonOpts& c, int grid) {
    auto dist = resolve_ensemble(c);
    auto rep = check_conditions(dist, grid);
    auto consts = ensemble_constants(dist);
    json j;
    j["ensemble"] = dist.name.empty() ? "custom" : dist.name;
    j["k"] = dist.k;
    if (!dist.symmetry_note.empty()) j["symmetry_note"] = dist.symmetry_note;
    j["conditions"] = condition_json(rep);
    j["omega"] = tagged(consts.omega, "closed form");
    j["omega_hat"] = tagged(consts.omega_hat, "closed form");
    emit(c, dump(j));
    return 0;
}

int run_thresholds(const CommonOpts& c, bool table, double delta) {
    auto dist = resolve_ensemble(c);
    auto rep = threshold_report(dist);
    json j;
    j["ensemble"] = rep.ensemble.empty() ? "custom" : rep.ensemble;
    j["k"] = rep.k;
    j["omega"] = tagged(rep.omega, "closed form");
    j["omega_hat"] = tagged(rep.omega_hat, "closed form");
    j["alpha_sat_lower"] = tagged(rep.alpha_sat_lower, "closed form");
    j["alpha_sat_upper"] = tagged(rep.alpha_sat_upper, "closed form");
    j["alpha_cluster_leading"] = tagged(rep.alpha_cluster_leading, "leading order");
    j["alpha_recon_leading"] = tagged(rep.alpha_recon_leading, "leading order");
    j["alpha_tree_numeric"] = tagged(rep.alpha_tree_numeric, "numeric tangency");
    j["alpha_tree_closed_form"] = tagged(rep.alpha_tree_closed_form, "closed form");
    j["second_moment_certificate"] = rep.second_moment_certificate;
    j["notes"] = rep.notes;
    (void)delta;
    if (table) {
        j["table"] = {
            {"reconstruction_clustering", rep.alpha_cluster_leading},
            {"sat_lower", rep.alpha_sat_lower},
            {"sat_upper", rep.alpha_sat_upper},
        };
    }
    emit(c, dump(j));
    return 0;
}

int run_tree_recon(const CommonOpts& c, double alpha, const std::string& range,
                   int depth, std::size_t samples) {
    auto dist = resolve_ensemble(c);
    std::vector<ReconStats> rows;
    for (double a : alpha_list(alpha, range)) {
        auto sweep = reconstruction_sweep(dist, a, depth, samples, c.seed,
                                          c.workers);
        rows.insert(rows.end(), sweep.begin(), sweep.end());
    }
    if (c.format == "csv") {
        std::ostringstream os;
        os << "alpha,depth,n,mean_abs_h,se_abs_h,mean_h_plus,se_h_plus,z_rate,se_z\n";
        for (const auto& r : rows) recon_row_csv(os, r);
        emit(c, os.str());
    } else {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(recon_row_json(r));
        emit(c, dump(arr));
    }
    return 0;
}

int run_second_moment(const CommonOpts& c, double alpha, double delta, int grid) {
    auto dist = resolve_ensemble(c);
    auto sup = phi_sup(dist, alpha, delta, grid);
    json j;
    j["ensemble"] = dist.name.empty() ? "custom" : dist.name;
    j["k"] = dist.k;
    j["alpha"] = alpha;
    j["delta"] = delta;
    j["sup"] = tagged(sup.sup, "grid certificate");
    j["argmax"] = sup.argmax;
    j["sup_from_zero"] = tagged(sup.sup_from_zero, "grid certificate");
    j["certificate_negative"] = sup.sup < 0.0;
    j["first_moment_exponent_at_zero"] =
        tagged(first_moment_exponent(dist, alpha, 0.0), "closed form");
    json grid_rows = json::array();
    for (int g = 0; g <= 100; ++g) {
        double theta = g / 100.0;
        grid_rows.push_back({{"theta", theta}, {"phi", phi(dist, alpha, theta)}});
    }
    j["grid"] = std::move(grid_rows);
    if (c.format == "csv") {
        std::ostringstream os;
        os << "theta,phi\n";
        char buf[128];
        for (const auto& row : j["grid"]) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                          row["theta"].get<double>(), row["phi"].get<double>());
            os << buf;
        }
        emit(c, os.str());
    } else {
        emit(c, dump(j));
    }
    return 0;
}

int run_instances(const CommonOpts& c, int n, double alpha, bool coloring, int q,
                  std::size_t pairs, int decay_var, int decay_rmax) {
    json j;
    j["n"] = n;
    j["alpha"] = alpha;
    j["seed"] = c.seed;
    if (coloring) {
        auto inst = sample_coloring_instance(n, q, alpha, c.seed);
        auto sol = solve_exhaustive(inst);
        j["q"] = q;
        j["edges"] = inst.edges.size();
        j["z"] = sol.z;
        j["mean_color_freq"] = sol.mean_color_freq;
        if (sol.z > 0) {
            auto ov = overlap_stats(inst, pairs, c.seed + 1);
            j["mean_type_dev"] = tagged(ov.mean_type_dev, "monte-carlo +/- se");
            j["exact_mean_type_dev"] =
                tagged(ov.exact_mean_type_dev, "enumeration");
            j["mean_row_marginal_dev"] = ov.mean_row_marginal_dev;
            j["mean_col_marginal_dev"] = ov.mean_col_marginal_dev;
        }
        json decay = json::array();
        for (int r = 1; r <= decay_rmax && sol.z > 0; ++r)
            decay.push_back({{"r", r}, {"tv", correlation_decay(inst, decay_var, r)}});
        j["correlation_decay"] = std::move(decay);
    } else {
        auto dist = resolve_ensemble(c);
        auto inst = sample_instance(dist, n, alpha, c.seed);
        auto sol = solve_exhaustive(dist, inst);
        j["ensemble"] = dist.name.empty() ? "custom" : dist.name;
        j["m"] = inst.clauses.size();
        j["empirical_clause_freq"] = inst.empirical_clause_freq;
        j["z"] = sol.z;
        j["z_balanced"] = sol.z_b;
        j["expected_z"] = tagged(expected_z(dist, n, alpha), "closed form");
        if (sol.z > 0) {
            auto ov = overlap_stats(dist, inst, pairs, c.seed + 1);
            j["mean_overlap"] = tagged(ov.mean_overlap, "monte-carlo +/- se");
            j["se_overlap"] = ov.se_overlap;
            j["n_pairs"] = ov.n_pairs;
            if (c.format == "csv") {
                std::ostringstream os;
                os << "overlap,count\n";
                char buf[128];
                for (const auto& [value, count] : ov.overlap_histogram) {
                    std::snprintf(buf, sizeof(buf), "%.17g,%llu\n", value,
                                  static_cast<unsigned long long>(count));
                    os << buf;
                }
                emit(c, os.str());
                return 0;
            }
            json hist = json::array();
            for (const auto& [value, count] : ov.overlap_histogram)
                hist.push_back({{"overlap", value}, {"count", count}});
            j["overlap_histogram"] = std::move(hist);
        }
        json decay = json::array();
        for (int r = 1; r <= decay_rmax && sol.z > 0; ++r)
            decay.push_back(
                {{"r", r}, {"tv", correlation_decay(dist, inst, decay_var, r)}});
        j["correlation_decay"] = std::move(decay);
    }
    emit(c, dump(j));
    return 0;
}

int run_coloring_opt(const CommonOpts& c, int q, double alpha, int restarts,
                     double delta, double eps, double kappa_tol,
                     std::size_t sweeps, bool with_kappa,
                     const std::string& trace_out) {
    json j;
    j["q"] = q;
    j["alpha"] = alpha;
    std::vector<TracePoint> trace;
    auto r = birkhoff_sup(q, alpha, restarts, c.seed,
                          trace_out.empty() ? nullptr : &trace);
    if (!trace_out.empty()) {
        std::ofstream tf(trace_out, std::ios::binary);
        if (!tf) throw validation_error("cannot open trace file: " + trace_out);
        tf << "restart,iter,value\n";
        char buf[96];
        for (const auto& t : trace) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", t.restart, t.iter,
                          t.value);
            tf << buf;
        }
    }
    double analytic = 2.0 * std::log(static_cast<double>(q)) +
                      2.0 * alpha * std::log(1.0 - 1.0 / q);
    double argmax_dev = 0.0;
    for (double x : r.argmax.v)
        argmax_dev = std::max(argmax_dev, std::abs(x - 1.0 / (q * q)));
    j["birkhoff"] = {{"value", tagged(r.value, "numeric")},
                     {"flat_value", tagged(analytic, "closed form")},
                     {"argmax_max_dev_from_flat", argmax_dev},
                     {"restarts", r.restarts_used}};
    if (with_kappa) {
        double kap = kappa(q, delta, eps, kappa_tol, c.seed);
        j["kappa"] = {{"delta", delta},
                      {"eps", eps},
                      {"value", tagged(kap, "numeric")},
                      {"floor", tagged((q - 1) * std::log(double(q - 1)),
                                       "closed form")}};
        if (sweeps > 0) {
            Rng rng(c.seed, 12, 0);
            double min_vec = kInf, min_mat = kInf;
            for (std::size_t i = 0; i < sweeps; ++i) {
                auto w = sample_b_vector(q, eps, rng);
                min_vec = std::min(min_vec, gap_slack(w, alpha, eps));
                if (alpha < kap && eps > 2.0 * delta) {
                    auto v = sample_b_matrix(q, delta, eps, rng);
                    min_mat = std::min(min_mat, gap_slack(v, alpha, kap, delta, eps));
                }
            }
            j["gap_sweeps"] = {{"n", sweeps},
                               {"vector_min_slack", min_vec},
                               {"matrix_min_slack", min_mat}};
        }
    }
    emit(c, dump(j));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-CSP thresholds, tree reconstruction and coloring lab"};
    app.require_subcommand(1);

    // a flat JSON config mirrors the flags; explicitly passed flags win
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    json cfg;
    try {
        cfg = config_json(config_path);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CommonOpts common;
    apply_common(cfg, common);

    int grid = 201;
    bool table = false;
    double delta = 0.02;
    double alpha = 1.0;
    std::string alpha_range;
    int depth = 3;
    std::size_t samples = 10000;
    int n = 12;
    bool coloring = false;
    int q = 3;
    std::size_t pairs = 100000;
    int decay_var = 0, decay_rmax = 0;
    int restarts = 64;
    double opt_delta = 0.0, opt_eps = 0.1, kappa_tol = 1e-4;
    std::size_t sweeps = 10000;
    bool with_kappa = false;
    std::string trace_out;

    from_config(cfg, "grid", grid);
    from_config(cfg, "table", table);
    from_config(cfg, "delta", delta);
    from_config(cfg, "alpha", alpha);
    from_config(cfg, "alpha_range", alpha_range);
    from_config(cfg, "depth", depth);
    from_config(cfg, "samples", samples);
    from_config(cfg, "n", n);
    from_config(cfg, "coloring", coloring);
    from_config(cfg, "q", q);
    from_config(cfg, "pairs", pairs);
    from_config(cfg, "decay_var", decay_var);
    from_config(cfg, "decay_rmax", decay_rmax);
    from_config(cfg, "restarts", restarts);
    from_config(cfg, "opt_delta", opt_delta);
    from_config(cfg, "opt_eps", opt_eps);
    from_config(cfg, "kappa_tol", kappa_tol);
    from_config(cfg, "sweeps", sweeps);
    from_config(cfg, "kappa", with_kappa);

    std::string config_echo;  // accepted on every subcommand, handled above

    auto* analyze = app.add_subcommand("analyze", "condition checks + constants");
    add_common_flags(analyze, common);
    analyze->add_option("--config", config_echo, "flat JSON config file");
    analyze->add_option("--grid", grid, "dominance/decay theta grid size");

    auto* thresholds = app.add_subcommand("thresholds", "threshold report");
    add_common_flags(thresholds, common);
    thresholds->add_option("--config", config_echo, "flat JSON config file");
    thresholds->add_flag("--table", table, "emit the three-column table row");
    thresholds->add_option("--delta", delta, "second-moment window start");

    auto* tree = app.add_subcommand("tree-recon", "broadcast reconstruction sweep");
    add_common_flags(tree, common);
    tree->add_option("--config", config_echo, "flat JSON config file");
    tree->add_option("--alpha", alpha, "clause density");
    tree->add_option("--alpha-range", alpha_range, "sweep a:b:step");
    tree->add_option("--depth", depth, "generations");
    tree->add_option("--samples", samples, "trees per point");

    auto* second = app.add_subcommand("second-moment", "pair-exponent grid + sup");
    add_common_flags(second, common);
    second->add_option("--config", config_echo, "flat JSON config file");
    second->add_option("--alpha", alpha, "clause density");
    second->add_option("--delta", delta, "window start for the sup");
    second->add_option("--grid", grid, "sup scan resolution");

    auto* inst = app.add_subcommand("instances", "finite instances + statistics");
    add_common_flags(inst, common);
    inst->add_option("--config", config_echo, "flat JSON config file");
    inst->add_option("--n", n, "variables / vertices");
    inst->add_option("--alpha", alpha, "density");
    inst->add_flag("--coloring", coloring, "coloring instance instead of binary");
    inst->add_option("--q", q, "colors");
    inst->add_option("--pairs", pairs, "solution pairs to sample");
    inst->add_option("--decay-var", decay_var, "probe variable");
    inst->add_option("--decay-rmax", decay_rmax, "probe radii 1..rmax");

    auto* copt = app.add_subcommand("coloring-opt", "entropy-energy optimization");
    add_common_flags(copt, common);
    copt->add_option("--config", config_echo, "flat JSON config file");
    copt->add_option("--q", q, "colors");
    copt->add_option("--alpha", alpha, "edge density");
    copt->add_option("--restarts", restarts, "optimizer restarts");
    copt->add_option("--delta", opt_delta, "marginal deviation bound");
    copt->add_option("--eps", opt_eps, "deviation floor");
    copt->add_option("--kappa-tol", kappa_tol, "bisection tolerance");
    copt->add_option("--sweeps", sweeps, "gap-inequality draws");
    copt->add_flag("--kappa", with_kappa, "run the kappa bisection");
    copt->add_option("--trace-out", trace_out, "ascent trace CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(common, grid);
        if (thresholds->parsed()) return run_thresholds(common, table, delta);
        if (tree->parsed())
            return run_tree_recon(common, alpha, alpha_range, depth, samples);
        if (second->parsed()) return run_second_moment(common, alpha, delta, grid);
        if (inst->parsed())
            return run_instances(common, n, alpha, coloring, q, pairs, decay_var,
                                 decay_rmax);
        if (copt->parsed())
            return run_coloring_opt(common, q, alpha, restarts, opt_delta,
                                    opt_eps, kappa_tol, sweeps, with_kappa,
                                    trace_out);
    } catch (const size_cap_error& e) {
        std::cerr << "size cap: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
