#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace orderbench {

/// Seeded generator whose output is identical on every platform.
///
/// std::mt19937_64 is bit-specified by the standard, but the standard
/// distributions are not, so bounded draws are done here by rejection.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

/// Seed for one named random stream of one keyed item (usually an instance id).
/// Streams with different names are independent for the same key.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key, std::string_view stream);

} // namespace orderbench
