#include "metasim/rng.hpp"

#include <cmath>
#include <cstdint>

namespace metasim {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1));
}

RandomStream::RandomStream(std::uint64_t seed) {
    // Expand the seed through splitmix64; xoshiro must not start all-zero.
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s = splitmix64(s);
        word = s;
    }
}

std::uint64_t RandomStream::next_u64() {
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

double RandomStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
    // Low bit forced on: u lies in (0,1), so the result is finite and
    // strictly positive (waiting times of zero would stall the clock).
    const double u = static_cast<double>((next_u64() >> 11) | 1ULL) * 0x1.0p-53;
    return -std::log(u) / rate;
}

std::int64_t RandomStream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
        // Inversion by multiplication of uniforms.
        const double limit = std::exp(-mean);
        double prod = uniform01();
        std::int64_t n = 0;
        while (prod > limit) {
            prod *= uniform01();
            ++n;
        }
        return n;
    }
    // PTRS transformed-rejection sampler.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = uniform01() - 0.5;
        const double v = uniform01();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

} // namespace metasim
