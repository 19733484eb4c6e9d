#pragma once

#include <cstdint>

namespace metasim {

/// Derives the seed of a child stream from a master seed and a stream id.
///
/// Stream 0..n-1 belong to the volumes (by index); stream n is reserved for
/// coordinator-level draws. The mix is splitmix64 applied to
/// master + (id+1) * golden gamma, so streams are decorrelated even for
/// adjacent master seeds and volume indices.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream_id);

/// Deterministic random stream (xoshiro256++ state, splitmix64-seeded).
///
/// All samplers are implemented here rather than via <random> distributions
/// so that results are bit-identical across standard libraries. A stream is
/// owned by exactly one volume (or the coordinator) during a step.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform01();

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate);

    /// Exact Poisson sample; inversion for small means, PTRS rejection
    /// (Hormann 1993) for mean >= 10.
    std::int64_t poisson(double mean);

private:
    std::uint64_t state_[4];
};

} // namespace metasim
