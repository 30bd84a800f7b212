#pragma once

#include <cstdint>

namespace bayeslab {

// Counter-based generator: output i of stream s under seed k is a pure hash of
// (k, s, i). Draws are reproducible bit-for-bit across platforms and
// compilers, which the report format relies on, and independent substreams are
// cheap (split() bumps the stream id, no state copying hazards).
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t counter = 0;

    explicit RngState(std::uint64_t seed_ = 0, std::uint64_t stream_ = 0)
        : seed(seed_), stream(stream_) {}

    std::uint64_t next_u64();
    // Uniform on (0,1), never returning an exact endpoint.
    double next_double();
    // A fresh stream decorrelated from this one; advances this state.
    RngState split();
};

}  // namespace bayeslab
