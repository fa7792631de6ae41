#pragma once

#include <cstdint>

namespace unbias::rng {

// Counter-based random streams: every draw is a pure hash of
// (seed, domain, indices), so generation order and thread layout
// cannot change results.

enum class Domain : std::uint64_t {
    Systematic = 1, // per-challenge shared offset
    ChipOffset = 2, // per-(chip, challenge) latent offset
    StageBias = 3,  // per-stage shared delay bias
    StageDelta = 4, // per-(chip, stage) delay delta
    Noise = 5,      // per-(chip, challenge, repeat) measurement noise
    Drift = 6,      // per-(chip, stress condition) mean shift
    Challenge = 7,  // challenge bit-pattern sampling
};

// splitmix64 finalizer; full 64-bit avalanche, bijective.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t cell_key(std::uint64_t seed, Domain domain, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed ^ 0x243F6A8885A308D3ull);
    h = mix64(h ^ static_cast<std::uint64_t>(domain));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Map a hashed word to (0,1); never returns an exact 0 or 1.
constexpr double u01(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw for one cell of a keyed stream.
double normal(std::uint64_t seed, Domain domain, std::uint64_t a = 0, std::uint64_t b = 0,
              std::uint64_t c = 0);

} // namespace unbias::rng
