#pragma once

#include <cmath>
#include <cstdint>

#include "permspec/errors.hpp"

namespace permspec {

namespace detail {

// SplitMix64 finalizer (Steele/Lea/Vigna). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t GOLDEN_GAMMA = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Counter-based stream: the output sequence is SplitMix64 started from a
// state derived by hashing (seed, stream_id). Distinct stream ids give
// sequences that never share internal state, so streams split without
// coordination. Pure 64-bit integer arithmetic; the u64 sequence is
// identical on every platform.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        state_ = detail::mix64(seed + detail::GOLDEN_GAMMA) ^
                 detail::mix64(stream_id + 0xD1B54A32D192ED03ULL);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        state_ += detail::GOLDEN_GAMMA;
        return detail::mix64(state_);
    }

    // Uniform on [0,1), 53 random bits.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1): safe under log().
    double u01_open() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw parameter_error("RandomStream::below: n must be positive");
        const std::uint64_t limit = (0 - n) % n;  // 2^64 mod n
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r < limit);
        return r % n;
    }

    bool bernoulli(double p) { return u01() < p; }

    // Exponential(1).
    double exponential() { return -std::log(u01_open()); }

    // Knuth's product method; fine for the small means used here.
    std::uint64_t poisson(double lambda) {
        if (!(lambda >= 0)) throw parameter_error("poisson: lambda must be >= 0");
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01_open();
        } while (p > limit);
        return k - 1;
    }

    // Derived independent stream, for splitting work across tasks.
    RandomStream substream(std::uint64_t i) const {
        return RandomStream(seed_, detail::mix64(stream_id_ ^ detail::mix64(i + 0xA0761D6478BD642FULL)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

}  // namespace permspec
