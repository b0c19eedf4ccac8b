#include "csplab/thresholds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace csplab {

namespace {

// H(theta) from the pair-overlap exponent; note H(0) = 0, H(1) = -log 2.
double overlap_entropy(double theta) {
    return -0.5 * (1.0 + theta) * std::log1p(theta) -
           ((1.0 - theta) > 0.0
                ? 0.5 * (1.0 - theta) * std::log(1.0 - theta)
                : 0.0);
}

struct ClauseCache {
    double weight;
    double norm_sq;
    std::vector<double> energy_by_weight;        // of phi
    std::vector<double> deriv_energy_by_weight;  // of the position-1 derivative
    std::vector<double> deriv_abs_by_weight;     // sum |coeff| grouped by |Q|
    double deriv_norm_sq;
};

std::vector<ClauseCache> build_cache(const ClauseDistribution& dist) {
    std::vector<ClauseCache> cache;
    cache.reserve(dist.support.size());
    for (const auto& wc : dist.support) {
        ClauseCache c;
        c.weight = wc.weight;
        c.norm_sq = wc.clause.norm_sq();
        c.energy_by_weight = fourier_transform(wc.clause).energy_by_weight();
        auto d = derivative(wc.clause, 1);
        auto ds = fourier_transform(d);
        c.deriv_energy_by_weight = ds.energy_by_weight();
        c.deriv_abs_by_weight.assign(d.k + 1, 0.0);
        for (std::size_t m = 0; m < ds.coeffs.size(); ++m)
            c.deriv_abs_by_weight[std::popcount(m)] += std::abs(ds.coeffs[m]);
        c.deriv_norm_sq = d.norm_sq();
        cache.push_back(std::move(c));
    }
    return cache;
}

double poly_eval(const std::vector<double>& by_weight, double theta) {
    double acc = 0.0, t = 1.0;
    for (double w : by_weight) {
        acc += w * t;
        t *= theta;
    }
    return acc;
}

}  // namespace

double first_moment_exponent(const ClauseDistribution& dist, double alpha,
                             double theta) {
    if (!(theta >= -1.0 && theta <= 1.0))
        throw std::domain_error("first_moment_exponent: theta in [-1,1]");
    if (!(alpha >= 0.0))
        throw std::domain_error("first_moment_exponent: alpha >= 0");
    return magnetization_entropy(theta) +
           alpha * dist.mean_log_norm_sq_theta(theta);
}

double phi(const ClauseDistribution& dist, double alpha, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("phi: theta must lie in [0,1]");
    if (!(alpha >= 0.0)) throw std::domain_error("phi: alpha >= 0");
    double e = 0.0;
    for (const auto& wc : dist.support) {
        double corr = self_correlation(fourier_transform(wc.clause), theta);
        double nsq = wc.clause.norm_sq();
        // corr is a sum of squares times theta^|Q| >= coefficient at empty set
        if (!(corr > 0.0)) throw validation_error("phi: vanishing correlation");
        e += wc.weight * std::log(corr / (nsq * nsq));
    }
    return overlap_entropy(theta) + alpha * e;
}

PhiSup phi_sup(const ClauseDistribution& dist, double alpha, double delta,
               int grid) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw validation_error("phi_sup: delta in (0,1]");
    if (grid < 8) grid = 8;
    auto cache = build_cache(dist);
    auto eval = [&](double theta) {
        double e = 0.0;
        for (const auto& c : cache) {
            double corr = poly_eval(c.energy_by_weight, theta);
            e += c.weight * std::log(corr / (c.norm_sq * c.norm_sq));
        }
        return overlap_entropy(theta) + alpha * e;
    };

    auto scan = [&](double lo, double hi) {
        double best = -kInf, arg = lo;
        for (int i = 0; i <= grid; ++i) {
            double t = lo + (hi - lo) * i / grid;
            double v = eval(t);
            if (v > best) {
                best = v;
                arg = t;
            }
        }
        // golden-section refinement around the best grid point
        double a = std::max(lo, arg - (hi - lo) / grid);
        double b = std::min(hi, arg + (hi - lo) / grid);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = eval(x1), f2 = eval(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = eval(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = eval(x1);
            }
        }
        double mid = 0.5 * (a + b), fm = eval(mid);
        if (fm > best) {
            best = fm;
            arg = mid;
        }
        return std::make_pair(best, arg);
    };

    PhiSup out;
    auto [s1, a1] = scan(delta, 1.0);
    out.sup = s1;
    out.argmax = a1;
    auto [s0, a0] = scan(1e-9, 1.0);
    (void)a0;
    out.sup_from_zero = s0;
    return out;
}

SatBounds sat_bounds(const ClauseDistribution& dist) {
    auto c = ensemble_constants(dist);
    SatBounds b;
    b.lower = c.omega * std::log(2.0);
    b.upper = c.omega_hat * std::log(2.0);
    b.second_moment_certificate =
        phi_sup(dist, 0.9 * b.lower, 0.02).sup < 0.0;
    return b;
}

RecursionState naive_recursion_limit(const ClauseDistribution& dist,
                                     double alpha, double tol,
                                     std::size_t max_iter) {
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
    if (!(tol > 0.0)) throw validation_error("tol must be positive");
    const double om = omega(dist);
    const int k = dist.k;
    const double rate = k * alpha / om;
    RecursionState st;
    st.alpha = alpha;
    double z = 1.0;
    st.z.push_back(z);
    for (st.iterations = 0; st.iterations < max_iter; ++st.iterations) {
        double zn = 1.0 - std::exp(-rate * std::pow(z, k - 1));
        if (st.z.size() < 64) st.z.push_back(zn);
        if (zn < 1e-14) {
            z = 0.0;
            st.converged = true;
            break;
        }
        if (std::abs(zn - z) < tol) {
            z = zn;
            st.converged = true;
            break;
        }
        z = zn;
    }
    st.limit = z;
    return st;
}

double recursion_tangency_u(int k) {
    if (k < 2) throw validation_error("arity must be >= 2");
    if (k == 2) return 0.0;  // transcritical limit
    // u = (k-1) log(1+u): Newton with a bisection safeguard on [lo, hi].
    double lo = 1e-12, hi = 10.0 * k * std::log(static_cast<double>(k) + 1.0);
    auto f = [&](double u) { return u - (k - 1) * std::log1p(u); };
    // f(lo) < 0 for k >= 3; grow hi until f(hi) > 0
    while (f(hi) <= 0.0) hi *= 2.0;
    double u = hi / 2.0;
    for (int it = 0; it < 200; ++it) {
        double fu = f(u);
        if (fu > 0.0)
            hi = u;
        else
            lo = u;
        double dfu = 1.0 - (k - 1) / (1.0 + u);
        double step = dfu != 0.0 ? u - fu / dfu : u;
        u = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return u;
}

double tree_threshold_scaled(int k) {
    if (k == 2) return 0.5;  // limit of u (1+1/u)^(k-1) / (k(k-1)) as u -> 0
    double u = recursion_tangency_u(k);
    // log-domain: exp((k-1) log(1+1/u)) can be large for big k
    double logv = std::log(u) + (k - 1) * std::log1p(1.0 / u) -
                  std::log(static_cast<double>(k)) -
                  std::log(static_cast<double>(k - 1));
    return std::exp(logv);
}

double tree_threshold_numeric(const ClauseDistribution& dist, double tol) {
    const double om = omega(dist);
    const int k = dist.k;
    const double closed = om * tree_threshold_scaled(k);
    // cross-validate by bisection on "recursion limit stays positive"
    double lo = 0.0, hi = std::max(2.0 * closed, 1.0);
    auto positive = [&](double a) {
        return naive_recursion_limit(dist, a, 1e-15, 2000000).limit > 1e-6;
    };
    while (!positive(hi)) hi *= 2.0;
    for (int it = 0; it < 60 && hi - lo > tol * 1e-3; ++it) {
        double mid = 0.5 * (lo + hi);
        (positive(mid) ? hi : lo) = mid;
    }
    double bisect = 0.5 * (lo + hi);
    if (std::abs(bisect - closed) > std::max(tol, 1e-9) * std::max(1.0, closed))
        throw validation_error(
            "tree threshold disagreement: tangency " + std::to_string(closed) +
            " vs bisection " + std::to_string(bisect));
    return closed;
}

double tree_threshold_closed_form(const ClauseDistribution& dist) {
    const int k = dist.k;
    const double om = omega(dist);
    if (k == 2) return om / 2.0;
    double u = recursion_tangency_u(k);
    double pw = std::exp((k - 2) * std::log1p(1.0 / u));
    return om * (1.0 + u * pw) / (static_cast<double>(k) * (k - 1));
}

std::pair<double, double> iter_bound_functions(const ClauseDistribution& dist,
                                               double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("iter_bound_functions: theta in [0,1]");
    auto cache = build_cache(dist);
    double f = 0.0, r = 0.0;
    for (const auto& c : cache) {
        f += c.weight * 2.0 * poly_eval(c.deriv_energy_by_weight, theta) /
             c.norm_sq;
        double inner = 0.0;
        double tpow = theta * theta;  // max(|Q|, 2) floors the exponent at 2
        inner += (c.deriv_abs_by_weight[0] + c.deriv_abs_by_weight.at(1)) * tpow;
        for (std::size_t j = 2; j < c.deriv_abs_by_weight.size(); ++j) {
            inner += c.deriv_abs_by_weight[j] * tpow;
            tpow *= theta;
        }
        r += c.weight * 2.0 * (2.0 * c.deriv_norm_sq / c.norm_sq) * inner;
    }
    return {f, r};
}

BoundTrajectory certify_nonreconstruction(const ClauseDistribution& dist,
                                          double alpha, int ell_max) {
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
    const double om = omega(dist);
    const int k = dist.k;
    BoundTrajectory tr;
    tr.alpha = alpha;
    // First step: the quoted seed 1-exp(-k a (1-1/Omega)) upper-bounds the
    // exact mean only when Omega >= 2, so take the max with the exact value.
    double h1 = 1.0 - std::exp(-k * alpha *
                               std::max(1.0 - 1.0 / om, 1.0 / om));
    tr.h_ave.push_back(h1);
    double h = h1;
    int below_count = 0;
    for (int ell = 2; ell <= ell_max; ++ell) {
        auto [f, r] = iter_bound_functions(dist, h);
        double hhat;
        if (ell == 2) {
            // first-step biases are supported on {0,1}, so the
            // non-negative-support shortcut applies
            hhat = f;
        } else {
            auto [fs, rs] = iter_bound_functions(dist, std::sqrt(h));
            (void)fs;
            hhat = 0.5 * f + 0.5 * rs;
        }
        double hn = 1.0 - std::exp(-2.0 * k * alpha * hhat);
        hn = std::min(hn, 1.0);
        tr.h_hat_ave.push_back(hhat);
        tr.h_ave.push_back(hn);
        if (hn < 1e-12) {
            // confirm monotone contraction for 10 further steps
            double hc = hn;
            bool mono = true;
            for (int extra = 0; extra < 10; ++extra) {
                auto [f2, r2] = iter_bound_functions(dist, hc);
                auto [f2s, r2s] = iter_bound_functions(dist, std::sqrt(hc));
                (void)f2s;
                (void)r2;
                double hh = 0.5 * f2 + 0.5 * r2s;
                double next = 1.0 - std::exp(-2.0 * k * alpha * hh);
                if (next > hc) {
                    mono = false;
                    break;
                }
                hc = next;
            }
            tr.certified_nonrecon = mono;
            break;
        }
        if (hn >= h) {
            ++below_count;
            if (below_count > 3) break;  // not contracting
        }
        h = hn;
    }
    return tr;
}

ColoringThresholds coloring_thresholds(int q) {
    if (q < 3) throw validation_error("coloring thresholds need q >= 3");
    ColoringThresholds t;
    double lq = std::log(static_cast<double>(q));
    t.alpha_sat = q * lq;
    t.alpha_cluster = 0.5 * q * lq;
    t.alpha_recon = 0.5 * q * (lq + std::log(lq));
    return t;
}

ThresholdReport threshold_report(const ClauseDistribution& dist) {
    ThresholdReport r;
    r.ensemble = dist.name;
    r.k = dist.k;
    auto c = ensemble_constants(dist);
    r.omega = c.omega;
    r.omega_hat = c.omega_hat;
    auto sb = sat_bounds(dist);
    r.alpha_sat_lower = sb.lower;
    r.alpha_sat_upper = sb.upper;
    r.second_moment_certificate = sb.second_moment_certificate;
    r.alpha_cluster_leading =
        c.omega / dist.k * std::log(static_cast<double>(dist.k));
    r.alpha_recon_leading = r.alpha_cluster_leading;
    r.alpha_tree_numeric = tree_threshold_numeric(dist);
    r.alpha_tree_closed_form = tree_threshold_closed_form(dist);
    r.notes.push_back("leading-order thresholds drop o(.)/O(1) terms");
    if (!sb.second_moment_certificate)
        r.notes.push_back(
            "second-moment certificate failed at 0.9 * lower bound");
    return r;
}

double first_step_mean(const ClauseDistribution& dist, double alpha) {
    return 1.0 - std::exp(-dist.k * alpha / omega(dist));
}

double first_step_quoted(const ClauseDistribution& dist, double alpha) {
    return 1.0 - std::exp(-dist.k * alpha * (1.0 - 1.0 / omega(dist)));
}

}  // namespace csplab
