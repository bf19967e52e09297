#pragma once

#include <cstdint>

namespace ergopt {

/// splitmix64: cheap stateless generator so parallel sweeps can draw the i-th
/// sample directly (identical streams regardless of thread count).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0,1) from (seed, index).
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(splitmix64(seed ^ (0xabcdULL + index * 0x9e3779b97f4a7c15ULL)) >> 11) *
           0x1.0p-53;
}

} // namespace ergopt
