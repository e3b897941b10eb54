#pragma once

#include <cstdint>
#include <string>

namespace d3r {

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Streaming content hash of a file; throws DataError if unreadable.
uint64_t fnv1a64_file(const std::string& path);

std::string hex64(uint64_t v);

} // namespace d3r
