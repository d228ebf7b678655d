#pragma once

#include <cstdint>
#include <string_view>

namespace mlc {

// Sub-seed derivation: splitmix64 over (base, FNV-1a(role), index). Both
// hashes are fixed algorithms, so derived seeds never change between builds.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view role, std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(base ^ fnv1a64(role)) + index);
}

} // namespace mlc
