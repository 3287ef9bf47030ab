#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "guireplay/types.hpp"

namespace guireplay::digest {

/// Lowercase hex SHA-256 of a byte buffer.
std::string sha256_hex(const std::uint8_t* data, size_t size);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_hex(const std::string& s);

/// Canonical image digest: SHA-256 over u32-LE width, u32-LE height and the
/// raw RGB bytes. Stable across PNG encoder settings.
std::string image_digest(const PixelImage& img);

/// FNV-1a 64-bit, used to derive deterministic sub-seeds.
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t mix_seed(std::uint64_t base, const std::string& tag, std::uint64_t n);

}  // namespace guireplay::digest
