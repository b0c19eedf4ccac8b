#include "csplab/coloring_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace csplab {

namespace {

constexpr double kSimplexTol = 1e-12;

void check_simplex(const std::vector<double>& x, const char* what) {
    double sum = 0.0;
    for (double v : x) {
        if (!(v >= 0.0)) throw validation_error(std::string(what) + ": negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol * 100)
        throw validation_error(std::string(what) + ": entries must sum to 1");
}

double log_or_neg_inf(double x) { return x > 1e-300 ? std::log(x) : -kInf; }

// Sinkhorn scaling toward row and column sums 1/q; the iterate stays
// strictly positive when the input is. Convergence is measured on the row
// residual after the column pass, the one that survives into the output.
void sinkhorn(std::vector<double>& v, int q, int iters = 300) {
    const double target = 1.0 / q;
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < q; ++i) {
            double r = 0.0;
            for (int j = 0; j < q; ++j) r += v[i * q + j];
            double s = target / r;
            for (int j = 0; j < q; ++j) v[i * q + j] *= s;
        }
        for (int j = 0; j < q; ++j) {
            double c = 0.0;
            for (int i = 0; i < q; ++i) c += v[i * q + j];
            double s = target / c;
            for (int i = 0; i < q; ++i) v[i * q + j] *= s;
        }
        double worst = 0.0;
        for (int i = 0; i < q; ++i) {
            double r = 0.0;
            for (int j = 0; j < q; ++j) r += v[i * q + j];
            worst = std::max(worst, std::abs(r - target));
        }
        if (worst < 1e-15) break;
    }
}

double objective(const std::vector<double>& v, int q, double coeff) {
    double h = 0.0, sum_sq = 0.0;
    std::vector<double> r(q, 0.0), c(q, 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            double x = v[i * q + j];
            h -= xlogx(x);
            sum_sq += x * x;
            r[i] += x;
            c[j] += x;
        }
    double arg = 1.0 + sum_sq;
    for (int i = 0; i < q; ++i) arg -= r[i] * r[i] + c[i] * c[i];
    return h + coeff * log_or_neg_inf(arg);
}

// Push the iterate out to ||v - flat||^2 >= eps along the flat-centered ray;
// clipping negatives and re-scaling may pull it back, so iterate a few times.
bool project_min_deviation(std::vector<double>& v, int q, double eps) {
    if (eps <= 0.0) return true;
    const double flat = 1.0 / (q * q);
    for (int round = 0; round < 24; ++round) {
        double dev = 0.0;
        for (double x : v) dev += (x - flat) * (x - flat);
        if (dev >= eps * (1.0 - 1e-12)) return true;
        if (dev < 1e-18) return false;  // stuck at the center
        double scale = std::sqrt(eps * 1.000001 / dev);
        bool clipped = false;
        for (double& x : v) {
            x = flat + scale * (x - flat);
            if (x < 1e-12) {
                x = 1e-12;
                clipped = true;
            }
        }
        sinkhorn(v, q);
        if (!clipped) {
            double check = 0.0;
            for (double x : v) check += (x - flat) * (x - flat);
            if (check >= eps * (1.0 - 1e-9)) return true;
        }
    }
    double dev = 0.0;
    for (double x : v) dev += (x - flat) * (x - flat);
    return dev >= eps * (1.0 - 1e-9);
}

struct AscentSettings {
    double eps = 0.0;  // 0 disables the deviation constraint
    int max_iters = 4000;
};

// Entropic (multiplicative) projected ascent from one start.
double ascend(std::vector<double>& v, int q, double coeff,
              const AscentSettings& cfg, std::vector<TracePoint>* trace,
              int restart_id) {
    sinkhorn(v, q);
    if (cfg.eps > 0.0 && !project_min_deviation(v, q, cfg.eps)) return -kInf;
    double fv = objective(v, q, coeff);
    double step = 0.25;
    std::vector<double> cand(v.size());
    int stagnant = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
        double sum_sq = 0.0;
        for (double x : v) sum_sq += x * x;
        std::vector<double> r(q, 0.0), c(q, 0.0);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                r[i] += v[i * q + j];
                c[j] += v[i * q + j];
            }
        double arg = 1.0 + sum_sq;
        for (int i = 0; i < q; ++i) arg -= r[i] * r[i] + c[i] * c[i];
        bool improved = false;
        for (int bt = 0; bt < 12 && !improved; ++bt) {
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) {
                    double x = v[i * q + j];
                    double g = -std::log(std::max(x, 1e-300)) - 1.0;
                    if (arg > 1e-300) g += coeff * 2.0 * x / arg;
                    cand[i * q + j] = x * std::exp(step * g);
                }
            sinkhorn(cand, q);
            bool feasible = cfg.eps <= 0.0 ||
                            project_min_deviation(cand, q, cfg.eps);
            double fc = feasible ? objective(cand, q, coeff) : -kInf;
            if (fc > fv) {
                v = cand;
                fv = fc;
                improved = true;
                step = std::min(step * 1.3, 2.0);
            } else {
                step *= 0.5;
            }
        }
        if (trace && (it % 32 == 0))
            trace->push_back({restart_id, it, fv});
        if (!improved) {
            if (++stagnant >= 2) break;
            step = 0.25;
        } else {
            stagnant = 0;
        }
    }
    return fv;
}

std::vector<std::vector<int>> permutations_upto(int q, int limit) {
    std::vector<int> p(q);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
        if (static_cast<int>(out.size()) >= limit) break;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<std::vector<double>> start_points(int q, double eps, int n_restarts,
                                              std::uint64_t seed) {
    std::vector<std::vector<double>> starts;
    const double flat = 1.0 / (q * q);
    starts.emplace_back(static_cast<std::size_t>(q) * q, flat);

    // permutation-supported corners, smoothed into the interior; when a
    // deviation floor is active, also mixtures sitting right on it
    for (const auto& p : permutations_upto(q, 24)) {
        std::vector<double> m(static_cast<std::size_t>(q) * q, 0.05 / (q * q));
        for (int i = 0; i < q; ++i) m[i * q + p[i]] += 0.95 / q;
        double norm = std::accumulate(m.begin(), m.end(), 0.0);
        for (double& x : m) x /= norm;
        starts.push_back(m);
        if (eps > 0.0) {
            double perm_dev = static_cast<double>(q - 1) / (q * q);
            if (eps < perm_dev) {
                double t = std::sqrt(eps / perm_dev) + 1e-6;
                std::vector<double> b(static_cast<std::size_t>(q) * q, flat);
                for (int i = 0; i < q; ++i)
                    b[i * q + p[i]] += t * (1.0 / q - 1.0 / (q * q));
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j)
                        if (j != p[i]) b[i * q + j] -= t * flat;
                for (double& x : b) x = std::max(x, 1e-12);
                starts.push_back(b);
            }
        }
    }

    // top up with random interior points; the analytic seeds always stay
    Rng rng(seed, /*purpose=*/8, 0);
    while (static_cast<int>(starts.size()) < n_restarts) {
        std::vector<double> d(static_cast<std::size_t>(q) * q);
        double sum = 0.0;
        for (double& x : d) {
            x = -std::log(std::max(rng.next_double(), 1e-300));
            sum += x;
        }
        for (double& x : d) x /= sum;
        starts.push_back(std::move(d));
    }
    return starts;
}

}  // namespace

TypeVector::TypeVector(int colors, std::vector<double> entries)
    : q(colors), w(std::move(entries)) {
    if (q < 2 || w.size() != static_cast<std::size_t>(q))
        throw validation_error("type vector needs q >= 2 entries");
    check_simplex(w, "type vector");
}

TypeVector TypeVector::flat(int q) {
    return TypeVector(q, std::vector<double>(q, 1.0 / q));
}

double TypeVector::dev_sq() const {
    double d = 0.0;
    for (double x : w) d += (x - 1.0 / q) * (x - 1.0 / q);
    return d;
}

TypeMatrix::TypeMatrix(int colors, std::vector<double> entries)
    : q(colors), v(std::move(entries)) {
    if (q < 2 || v.size() != static_cast<std::size_t>(q) * q)
        throw validation_error("type matrix needs q*q entries");
    check_simplex(v, "type matrix");
}

TypeMatrix TypeMatrix::flat(int q) {
    return TypeMatrix(q, std::vector<double>(static_cast<std::size_t>(q) * q,
                                             1.0 / (q * q)));
}

std::vector<double> TypeMatrix::row_sums() const {
    std::vector<double> r(q, 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) r[i] += at(i, j);
    return r;
}

std::vector<double> TypeMatrix::col_sums() const {
    std::vector<double> c(q, 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) c[j] += at(i, j);
    return c;
}

double TypeMatrix::dev_sq() const {
    const double flat = 1.0 / (q * q);
    double d = 0.0;
    for (double x : v) d += (x - flat) * (x - flat);
    return d;
}

double TypeMatrix::row_marginal_dev() const {
    double d = 0.0;
    for (double r : row_sums()) d += (r - 1.0 / q) * (r - 1.0 / q);
    return d;
}

double TypeMatrix::col_marginal_dev() const {
    double d = 0.0;
    for (double c : col_sums()) d += (c - 1.0 / q) * (c - 1.0 / q);
    return d;
}

Functionals functionals(const TypeMatrix& m) {
    Functionals f;
    double sum_sq = 0.0;
    for (double x : m.v) {
        f.entropy -= xlogx(x);
        sum_sq += x * x;
    }
    double arg = 1.0 + sum_sq;
    for (double r : m.row_sums()) arg -= r * r;
    for (double c : m.col_sums()) arg -= c * c;
    f.energy = log_or_neg_inf(arg);
    return f;
}

Functionals functionals(const TypeVector& w) {
    Functionals f;
    double sum_sq = 0.0;
    for (double x : w.w) {
        f.entropy -= xlogx(x);
        sum_sq += x * x;
    }
    f.energy = log_or_neg_inf(1.0 - sum_sq);
    return f;
}

VectorMembership membership(const TypeVector& w, double eps) {
    VectorMembership m;
    m.dev = w.dev_sq();
    m.in_set = m.dev >= eps;
    return m;
}

MatrixMembership membership(const TypeMatrix& v, double delta, double eps) {
    MatrixMembership m;
    m.row_dev = v.row_marginal_dev();
    m.col_dev = v.col_marginal_dev();
    m.dev = v.dev_sq();
    m.row_dev_ok = m.row_dev <= delta + 1e-12;
    m.col_dev_ok = m.col_dev <= delta + 1e-12;
    m.dev_big_enough = m.dev >= eps;
    m.in_set = m.row_dev_ok && m.col_dev_ok && m.dev_big_enough;
    return m;
}

OptResult birkhoff_sup(int q, double alpha, int n_restarts, std::uint64_t seed,
                       std::vector<TracePoint>* trace) {
    if (q < 3) throw validation_error("birkhoff_sup needs q >= 3");
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
    AscentSettings cfg;
    OptResult best{-kInf, TypeMatrix::flat(q), false, 0};
    auto starts = start_points(q, 0.0, std::max(n_restarts, 1), seed);
    int id = 0;
    for (auto& s : starts) {
        double val = ascend(s, q, alpha, cfg, trace, id++);
        if (val > best.value) {
            best.value = val;
            best.argmax = TypeMatrix(q, s);
        }
    }
    best.restarts_used = id;
    best.converged = true;
    double analytic = 2.0 * std::log(static_cast<double>(q)) +
                      2.0 * alpha * std::log(1.0 - 1.0 / q);
    if (alpha <= (q - 1) * std::log(static_cast<double>(q - 1)) + 1e-12 &&
        best.value > analytic + 1e-6)
        throw validation_error("optimizer exceeded the doubly-stochastic bound");
    return best;
}

OptResult constrained_sup(int q, double coeff, double delta, double eps,
                          int n_restarts, std::uint64_t seed) {
    if (q < 3) throw validation_error("constrained_sup needs q >= 3");
    (void)delta;  // the ascent explores the uniform-marginal slice of the set
    AscentSettings cfg;
    cfg.eps = eps;
    OptResult best{-kInf, TypeMatrix::flat(q), false, 0};
    auto starts = start_points(q, eps, std::max(n_restarts, 1), seed);
    int id = 0;
    for (auto& s : starts) {
        double val = ascend(s, q, coeff, cfg, nullptr, id++);
        if (val > best.value) {
            best.value = val;
            best.argmax = TypeMatrix(q, s);
        }
    }
    best.restarts_used = id;
    best.converged = best.value > -kInf;
    return best;
}

double kappa(int q, double delta, double eps, double tol, std::uint64_t seed) {
    if (q < 3) throw validation_error("kappa needs q >= 3");
    if (!(eps > 0.0)) throw validation_error("kappa needs eps > 0");
    // emptiness probe: the uniform-marginal slice caps ||v-flat||^2 at (q-1)/q^2
    if (eps > static_cast<double>(q - 1) / (q * q) + 2.0 * delta)
        throw validation_error("deviation set is empty for this eps");

    auto flat_value = [&](double c) {
        return 2.0 * std::log(static_cast<double>(q)) +
               2.0 * c * std::log(1.0 - 1.0 / q);
    };
    auto feasible = [&](double c) {
        auto r = constrained_sup(q, c, delta, eps, 32, seed);
        return r.value <= flat_value(c) - 1e-7;
    };
    double lo = 0.0, hi = 4.0 * q * std::log(static_cast<double>(q));
    if (feasible(hi)) return hi;
    if (!feasible(lo)) return lo;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double gap_slack(const TypeVector& w, double alpha, double eps) {
    auto m = membership(w, eps);
    if (!m.in_set)
        throw validation_error("vector outside the deviation set");
    auto fw = functionals(w);
    auto fflat = functionals(TypeVector::flat(w.q));
    if (fw.energy == -kInf) return kInf;
    double diff = (fflat.entropy + alpha * fflat.energy) -
                  (fw.entropy + alpha * fw.energy);
    return diff - alpha * eps / (2.0 * (1.0 - 1.0 / w.q));
}

double gap_slack(const TypeMatrix& v, double alpha, double kappa_val,
                 double delta, double eps) {
    if (!(eps > 2.0 * delta))
        throw validation_error("gap inequality needs eps > 2 delta");
    if (!(alpha < kappa_val))
        throw validation_error("gap inequality needs alpha < kappa");
    auto m = membership(v, delta, eps);
    if (!m.in_set)
        throw validation_error("matrix outside the deviation set");
    auto fv = functionals(v);
    auto fflat = functionals(TypeMatrix::flat(v.q));
    if (fv.energy == -kInf) return kInf;
    double diff = (fflat.entropy + alpha * fflat.energy) -
                  (fv.entropy + alpha * fv.energy);
    double margin = (kappa_val - alpha) * (eps - 2.0 * delta) /
                    (2.0 * (1.0 - 1.0 / v.q) * (1.0 - 1.0 / v.q));
    return diff - margin;
}

TypeVector sample_b_vector(int q, double eps, Rng& rng) {
    for (int tries = 0; tries < 10000; ++tries) {
        std::vector<double> d(q);
        double sum = 0.0;
        for (double& x : d) {
            x = -std::log(std::max(rng.next_double(), 1e-300));
            sum += x;
        }
        for (double& x : d) x /= sum;
        double usq = 0.0;
        for (double x : d) usq += (x - 1.0 / q) * (x - 1.0 / q);
        if (usq < 1e-6) continue;
        double unorm = std::sqrt(usq);
        double rho_min = std::sqrt(eps) / unorm;
        double rho_max = kInf;
        for (double x : d) {
            double u = x - 1.0 / q;
            if (u < 0.0) rho_max = std::min(rho_max, (1.0 / q) / (-u));
        }
        if (rho_min > rho_max) continue;
        double rho = rho_min + (rho_max - rho_min) * rng.next_double();
        std::vector<double> w(q);
        for (int i = 0; i < q; ++i)
            w[i] = std::max(0.0, 1.0 / q + rho * (d[i] - 1.0 / q));
        double norm = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= norm;
        TypeVector tv(q, w);
        if (tv.dev_sq() >= eps) return tv;
    }
    throw validation_error("could not sample from the vector deviation set");
}

TypeMatrix sample_b_matrix(int q, double delta, double eps, Rng& rng) {
    (void)delta;  // draws sit on the uniform-marginal slice, inside any delta
    for (int tries = 0; tries < 10000; ++tries) {
        std::vector<double> d(static_cast<std::size_t>(q) * q);
        double sum = 0.0;
        for (double& x : d) {
            x = -std::log(std::max(rng.next_double(), 1e-300));
            sum += x;
        }
        for (double& x : d) x /= sum;
        sinkhorn(d, q);
        const double flat = 1.0 / (q * q);
        double usq = 0.0;
        for (double x : d) usq += (x - flat) * (x - flat);
        if (usq < 1e-6) continue;  // keeps the radial scale bounded
        double rho_min = std::sqrt(eps / usq);
        double rho_max = kInf;
        for (double x : d) {
            double u = x - flat;
            if (u < 0.0) rho_max = std::min(rho_max, flat / (-u));
        }
        if (rho_min > rho_max) continue;
        double rho = rho_min + (rho_max - rho_min) * rng.next_double();
        std::vector<double> m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m[i] = std::max(0.0, flat + rho * (d[i] - flat));
        TypeMatrix tm(q, m);
        if (tm.dev_sq() >= eps && tm.row_marginal_dev() <= 1e-13 &&
            tm.col_marginal_dev() <= 1e-13)
            return tm;
    }
    throw validation_error("could not sample from the matrix deviation set");
}

}  // namespace csplab
