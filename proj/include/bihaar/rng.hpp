#pragma once

#include <cmath>
#include <cstdint>

namespace bihaar {

// Counter-based deterministic stream: the state is derived by hashing
// (seed, replicate, index), so draws for one bin are independent of the
// order in which bins are visited. SplitMix64 steps and finalizer.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index) {
        state_ = mix(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ replicate) ^ index);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double uniform() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal, Box-Muller pair with caching.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586477 * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    // Poisson draw; Knuth's product method on chunks of intensity <= 60
    // (the per-chunk floor e^{-60} stays comfortably above underflow).
    std::uint64_t poisson(double mu) {
        std::uint64_t total = 0;
        while (mu > 60.0) {
            total += poisson_knuth(60.0);
            mu -= 60.0;
        }
        if (mu > 0.0) total += poisson_knuth(mu);
        return total;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t poisson_knuth(double mu) {
        const double floor_p = std::exp(-mu);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > floor_p);
        return k - 1;
    }

    std::uint64_t state_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace bihaar
