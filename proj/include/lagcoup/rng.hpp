#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace lagcoup {

// splitmix64 step; used both as a stand-alone mixer for seed derivation and
// to expand a single seed into the xoshiro state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive a stream seed from (master_seed, key...). Each work unit in the
// runner gets its own key tuple, so streams are reproducible under any
// scheduling of the work.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = master ^ 0xA3EC647659359ACDull;
    std::uint64_t acc = splitmix64_next(s);
    for (std::uint64_t k : key) {
        s ^= k + 0x9E3779B97F4A7C15ull + (acc << 6) + (acc >> 2);
        acc = splitmix64_next(s);
    }
    return acc;
}

// xoshiro256++ stream. All randomness in the library flows through this type;
// distribution transforms are spelled out below so that results depend only on
// the bit stream, not on implementation-defined std:: distributions.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64_next(sm);
    }

    static RngStream from_key(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
        return RngStream(derive_seed(master, key));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0,1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1); safe as a log() argument
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    bool coin() { return (next_u64() >> 63) != 0; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, cosine branch only: two uniforms per draw, no cached state.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Geometric on {1,2,...} with success probability p, by inversion.
    long geometric(double p) {
        if (p >= 1.0) return 1;
        const double g = std::floor(std::log(uniform_pos()) / std::log1p(-p));
        if (!(g < static_cast<double>(std::numeric_limits<long>::max()))) return std::numeric_limits<long>::max();
        return 1 + static_cast<long>(g);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace lagcoup
