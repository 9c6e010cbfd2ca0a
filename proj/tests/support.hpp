#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bihaar/nd_array.hpp"
#include "bihaar/rng.hpp"

namespace testsup {

inline bool close_rel(double a, double b, double rel) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * std::max(scale, 1e-300);
}

inline bool close_abs(double a, double b, double abs_tol) {
    return std::abs(a - b) <= abs_tol;
}

// Simple deterministic test-data generator (not the library stream).
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : s_(seed ? seed : 1) {}
    std::uint64_t next() {
        s_ ^= s_ << 13;
        s_ ^= s_ >> 7;
        s_ ^= s_ << 17;
        return s_;
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t s_;
};

inline bihaar::NdArray random_counts(std::vector<std::size_t> dims,
                                     std::uint64_t seed, unsigned max_count = 20) {
    bihaar::NdArray a(std::move(dims));
    TestRng rng(seed);
    for (double& v : a.data) v = double(rng.below(max_count + 1));
    return a;
}

inline bihaar::NdArray random_reals(std::vector<std::size_t> dims,
                                    std::uint64_t seed, double lo = -10.0,
                                    double hi = 10.0) {
    bihaar::NdArray a(std::move(dims));
    TestRng rng(seed);
    for (double& v : a.data) v = lo + (hi - lo) * rng.uniform();
    return a;
}

inline double max_abs_diff(const bihaar::NdArray& a, const bihaar::NdArray& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testsup
