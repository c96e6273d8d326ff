#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "calibra/scalars.hpp"

namespace calibra {

/// Counter-based deterministic generator. A value is a pure function of
/// (seed, stream, counter), so parallel consumers derive independent streams
/// without shared state. Restart i of a multi-restart run uses seed ^ i.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ mix(stream ^ 0x7f4a7c15 * 0x9e3779b9))) {}

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        return seed ^ index;
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    long uniform_int(long lo, long hi) {
        return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Small random rational, numerator in [-9, 9], denominator in [1, 9].
    Rational rational() {
        long num = uniform_int(-9, 9);
        long den = uniform_int(1, 9);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    std::vector<Rational> rational_vector(int dim) {
        std::vector<Rational> v(static_cast<std::size_t>(dim));
        for (auto& x : v) x = rational();
        return v;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace calibra
