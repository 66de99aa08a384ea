#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace elmkit {

// Feature hashing uses a fixed 64-bit mixing hash so that encodings are
// reproducible across platforms and compilers. The definition below is
// normative; frozen test vectors live in tests/test_hash.cpp.

/// splitmix64 finalizer. Full avalanche on a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Keyed hash of a 64-bit value.
constexpr std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t v) noexcept {
    return mix64(mix64(seed ^ 0xa0761d6478bd642full) ^ mix64(v));
}

namespace detail {
// Assembles up to 8 bytes as a little-endian word regardless of host order.
inline std::uint64_t load_le64(const unsigned char* p, std::size_t n) noexcept {
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < n; ++i) w |= std::uint64_t(p[i]) << (8 * i);
    return w;
}
}  // namespace detail

/// Keyed hash of a byte string. Consumes little-endian 64-bit words with a
/// zero-padded tail; the length is folded into the initial state so prefixes
/// hash differently from their extensions.
inline std::uint64_t hash_bytes(std::uint64_t seed, std::string_view bytes) noexcept {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t n = bytes.size();
    std::uint64_t h = mix64(seed ^ (0xd1b54a32d192ed03ull * (std::uint64_t(n) + 1)));
    while (n >= 8) {
        h = mix64(h ^ detail::load_le64(p, 8));
        p += 8;
        n -= 8;
    }
    if (n > 0) h = mix64(h ^ detail::load_le64(p, n) ^ (std::uint64_t(n) << 56));
    return mix64(h);
}

/// Per-field sub-seed; field identity is its position in the schema.
constexpr std::uint64_t field_seed(std::uint64_t seed, std::size_t field_index) noexcept {
    return hash_u64(seed, std::uint64_t(field_index));
}

}  // namespace elmkit
