#pragma once

#include <cmath>
#include <cstdint>

#include "csplab/common.hpp"

namespace csplab {

// All randomness in the project flows from one 64-bit master seed.
// Independent streams are derived by counter-mode splitting: the stream for
// (seed, purpose, index) is a function of those values only, so results do
// not depend on thread count or evaluation order.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix-derived state.
class Rng {
public:
    Rng() : Rng(0, 0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
        std::uint64_t sm = seed;
        splitmix64(sm);
        sm ^= 0x6a09e667f3bcc909ull * (purpose + 1);
        splitmix64(sm);
        sm ^= 0xbb67ae8584caa73bull * (index + 1);
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n); Lemire multiply-shift
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Poisson by inversion, exact for small means; larger means are split into
// chunks of mean <= 16 and summed (Poisson additivity), staying exact.
// The sampler form caches exp(-lambda) for hot loops.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean) {
        if (!(mean >= 0.0))
            throw validation_error("poisson: mean must be >= 0");
        chunks_ = mean == 0.0 ? 0 : static_cast<int>(std::ceil(mean / 16.0));
        lam_ = chunks_ ? mean / chunks_ : 0.0;
        p0_ = std::exp(-lam_);
    }

    std::uint64_t operator()(Rng& rng) const {
        std::uint64_t total = 0;
        for (int c = 0; c < chunks_; ++c) {
            double u = rng.next_double();
            double p = p0_;
            double cum = p;
            std::uint64_t k = 0;
            while (u > cum && k < 1u << 20) {
                ++k;
                p *= lam_ / static_cast<double>(k);
                cum += p;
            }
            total += k;
        }
        return total;
    }

private:
    int chunks_ = 0;
    double lam_ = 0.0;
    double p0_ = 1.0;
};

inline std::uint64_t poisson(Rng& rng, double mean) {
    return PoissonSampler(mean)(rng);
}

}  // namespace csplab
