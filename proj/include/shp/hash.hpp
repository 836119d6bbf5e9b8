// hash.hpp - stateless seeded hashing for per-vertex random decisions
#ifndef SHP_HASH_HPP
#define SHP_HASH_HPP

#include <cstdint>

namespace shp {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

inline constexpr std::uint64_t vertex_hash(std::uint64_t seed, std::uint64_t vertex) {
    return splitmix64(seed + splitmix64(vertex));
}

// Uniform in [0, 1) from the top 53 bits.
inline constexpr double unit_interval(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace shp

#endif // SHP_HASH_HPP
