#include "mathforge/rng.hpp"

namespace mathforge {

namespace {

// FNV-1a 64 with a splitmix finisher; cheap and stable across platforms.
std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t finalize(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view item_key) {
    std::uint64_t h = fnv1a(1469598103934665603ULL, &global_seed, sizeof(global_seed));
    h = fnv1a(h, item_key.data(), item_key.size());
    return finalize(h);
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) {
    std::uint64_t h = fnv1a(1469598103934665603ULL, &global_seed, sizeof(global_seed));
    h = fnv1a(h, &index, sizeof(index));
    return finalize(h);
}

} // namespace mathforge
