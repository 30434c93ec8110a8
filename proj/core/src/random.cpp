#include "orderbench/random.hpp"

#include <limits>

namespace orderbench {

std::uint64_t Rng::below(std::uint64_t bound)
{
    // Reject the tail so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = next();
    while (x >= limit) {
        x = next();
    }
    return x % bound;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key, std::string_view stream)
{
    std::uint64_t h = splitmix64(global_seed);
    h = splitmix64(h ^ fnv1a64(stream));
    h = splitmix64(h ^ fnv1a64(key));
    return h;
}

} // namespace orderbench
