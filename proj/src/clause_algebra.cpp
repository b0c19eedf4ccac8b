#include "csplab/clause_algebra.hpp"

#include <bit>
#include <cmath>

#include "json.hpp"

namespace csplab {

namespace {

void check_arity(int k) {
    if (k < 1 || k > kMaxArity)
        throw validation_error("arity must be in [1, " +
                               std::to_string(kMaxArity) + "], got " +
                               std::to_string(k));
}

int popcount32(std::uint32_t x) { return std::popcount(x); }

}  // namespace

Assignment::Assignment(int arity, std::uint32_t b) : k(arity), bits(b) {
    check_arity(k);
    if (b >= (1u << k))
        throw std::out_of_range("assignment bits out of range for arity " +
                                std::to_string(k));
}

std::vector<int> Assignment::to_vector() const {
    std::vector<int> x(k);
    for (int i = 1; i <= k; ++i) x[i - 1] = spin(i);
    return x;
}

Assignment Assignment::from_vector(const std::vector<int>& x) {
    return Assignment(static_cast<int>(x.size()), assignment_to_index(x));
}

Assignment index_to_assignment(std::uint32_t bits, int k) {
    return Assignment(k, bits);
}

std::uint32_t assignment_to_index(const std::vector<int>& x) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 1 && x[i] != -1)
            throw validation_error("assignment components must be +1 or -1");
        if (x[i] == 1) m |= 1u << i;
    }
    return m;
}

ClauseTable::ClauseTable(int arity, std::vector<double> v)
    : k(arity), values(std::move(v)) {
    check_arity(k);
    if (values.size() != (std::size_t{1} << k))
        throw validation_error("table length must be 2^k");
}

bool ClauseTable::is_boolean() const {
    for (double v : values)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

double ClauseTable::norm_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s / static_cast<double>(values.size());
}

ClauseTable ClauseTable::from_truth_table(int k, const std::string& tt) {
    check_arity(k);
    if (tt.size() != (std::size_t{1} << k))
        throw validation_error("truth_table string must have 2^k characters");
    std::vector<double> v(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i) {
        if (tt[i] == '0')
            v[i] = 0.0;
        else if (tt[i] == '1')
            v[i] = 1.0;
        else
            throw validation_error("truth_table may contain only '0' and '1'");
    }
    return ClauseTable(k, std::move(v));
}

std::string ClauseTable::truth_table() const {
    if (!is_boolean())
        throw validation_error("truth_table() requires a Boolean table");
    std::string s(values.size(), '0');
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == 1.0) s[i] = '1';
    return s;
}

ClauseTable ClauseTable::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("clause JSON parse error: ") + e.what());
    }
    if (!j.contains("k") || !j.contains("truth_table"))
        throw validation_error("clause JSON needs fields 'k' and 'truth_table'");
    return from_truth_table(j.at("k").get<int>(),
                            j.at("truth_table").get<std::string>());
}

std::string ClauseTable::to_json_text() const {
    nlohmann::json j;
    j["k"] = k;
    j["truth_table"] = truth_table();
    return j.dump();
}

double FourierSpectrum::energy() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return s;
}

std::vector<double> FourierSpectrum::energy_by_weight() const {
    std::vector<double> w(k + 1, 0.0);
    for (std::size_t m = 0; m < coeffs.size(); ++m)
        w[popcount32(static_cast<std::uint32_t>(m))] += coeffs[m] * coeffs[m];
    return w;
}

BiasVector::BiasVector(int arity, std::vector<double> values)
    : k(arity), h(std::move(values)) {
    check_arity(k);
    if (h.size() != static_cast<std::size_t>(k))
        throw validation_error("bias vector length must equal arity");
    for (double v : h)
        if (!(v >= -1.0 && v <= 1.0))
            throw std::domain_error("bias components must lie in [-1,1]");
}

BiasVector BiasVector::constant(int arity, double theta) {
    return BiasVector(arity, std::vector<double>(arity, theta));
}

// Butterfly for the basis gamma_Q(x) = prod_{i in Q} x_i with +1 on set bits:
// the entry with bit i set carries (f_set - f_clear) for that coordinate.
FourierSpectrum fourier_transform(const ClauseTable& f) {
    FourierSpectrum s;
    s.k = f.k;
    s.coeffs = f.values;
    auto& a = s.coeffs;
    const std::size_t n = a.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                double lo = a[j], hi = a[j + len];
                a[j] = lo + hi;
                a[j + len] = hi - lo;
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& c : a) c *= scale;
    return s;
}

ClauseTable inverse_fourier(const FourierSpectrum& s) {
    std::vector<double> a = s.coeffs;
    const std::size_t n = a.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                double u = a[j], v = a[j + len];
                a[j] = u - v;
                a[j + len] = u + v;
            }
        }
    }
    return ClauseTable(s.k, std::move(a));
}

double inner_theta(const ClauseTable& f, const ClauseTable& g, double theta) {
    if (f.k != g.k) throw validation_error("inner_theta: arity mismatch");
    if (!(theta >= -1.0 && theta <= 1.0))
        throw std::domain_error("inner_theta: theta must lie in [-1,1]");
    // v_theta(x) depends on x only through popcount(x).
    const double up = (1.0 + theta) / 2.0, dn = (1.0 - theta) / 2.0;
    std::vector<double> w(f.k + 1);
    for (int j = 0; j <= f.k; ++j)
        w[j] = std::pow(up, j) * std::pow(dn, f.k - j);
    double s = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m)
        s += f.values[m] * g.values[m] * w[popcount32(static_cast<std::uint32_t>(m))];
    return s;
}

double norm_sq_theta(const ClauseTable& f, double theta) {
    return inner_theta(f, f, theta);
}

FourierSpectrum noise_apply(const FourierSpectrum& s, const BiasVector& h) {
    if (s.k != h.k) throw validation_error("noise_apply: arity mismatch");
    FourierSpectrum out;
    out.k = s.k;
    out.coeffs.resize(s.coeffs.size());
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
        double g = 1.0;
        std::uint32_t q = static_cast<std::uint32_t>(m);
        while (q) {
            int i = std::countr_zero(q);
            g *= h.h[i];
            q &= q - 1;
        }
        out.coeffs[m] = s.coeffs[m] * g;
    }
    return out;
}

FourierSpectrum noise_apply(const FourierSpectrum& s, double theta) {
    return noise_apply(s, BiasVector::constant(s.k, theta));
}

ClauseTable derivative(const ClauseTable& f, int i) {
    if (i < 1 || i > f.k) throw std::out_of_range("derivative: bad variable index");
    const std::uint32_t low = (1u << (i - 1)) - 1;
    const std::uint32_t bit = 1u << (i - 1);
    std::vector<double> d(f.size() >> 1);
    for (std::uint32_t y = 0; y < d.size(); ++y) {
        std::uint32_t base = (y & low) | ((y & ~low) << 1);
        d[y] = 0.5 * (f.values[base | bit] - f.values[base]);
    }
    return ClauseTable(f.k - 1, std::move(d));
}

double influence(const ClauseTable& f, int i) {
    return derivative(f, i).norm_sq();
}

double self_correlation(const FourierSpectrum& s, double theta) {
    if (!(theta >= -1.0 && theta <= 1.0))
        throw std::domain_error("self_correlation: theta must lie in [-1,1]");
    std::vector<double> w = s.energy_by_weight();
    double acc = 0.0;
    double t = 1.0;
    for (int j = 0; j <= s.k; ++j) {
        acc += w[j] * t;
        t *= theta;
    }
    return acc;
}

PartialSets partial_sets(const ClauseTable& f) {
    if (f.k < 2) throw validation_error("partial_sets: arity must be >= 2");
    if (!f.is_boolean())
        throw std::domain_error("partial_sets: table must be Boolean");
    PartialSets ps;
    ps.k = f.k;
    const std::uint32_t half = 1u << (f.k - 1);
    for (std::uint32_t y = 0; y < half; ++y) {
        bool plus = f.values[(y << 1) | 1u] == 1.0;
        bool minus = f.values[y << 1] == 1.0;
        if (plus) ps.s_plus.push_back(y);
        if (minus) ps.s_minus.push_back(y);
        if (plus && !minus) ps.lambda_plus.push_back(y);
        if (minus && !plus) ps.lambda_minus.push_back(y);
    }
    return ps;
}

}  // namespace csplab
