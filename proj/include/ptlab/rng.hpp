#pragma once

#include <cmath>
#include <cstdint>

namespace ptlab {

/**
 * xorshift64* generator (Vigna). State update
 *   s ^= s >> 12; s ^= s << 25; s ^= s >> 27;  out = s * 0x2545F4914F6CDD1D
 * The seed is passed through splitmix64 once so that small seeds give
 * well-mixed streams; seed 0 is legal.
 *
 * The algorithm is fixed so any reimplementation reproduces the same
 * random plants and draws from the same seed.
 */
class Xorshift64 {
public:
    explicit Xorshift64(std::uint64_t seed) noexcept {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        state_ = z ^ (z >> 31);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t next() noexcept {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Log-uniform in [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) noexcept {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

private:
    std::uint64_t state_;
};

} // namespace ptlab
