#include "bayeslab/rng.hpp"

namespace bayeslab {
namespace {

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t RngState::next_u64() {
    std::uint64_t key = mix64(seed ^ mix64(stream));
    std::uint64_t out = mix64(key ^ mix64(counter));
    ++counter;
    return out;
}

double RngState::next_double() {
    // 53 random bits, offset by half an ulp so 0 and 1 are unreachable.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

RngState RngState::split() {
    RngState child(seed, next_u64());
    return child;
}

}  // namespace bayeslab
