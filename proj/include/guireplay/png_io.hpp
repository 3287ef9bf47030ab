#pragma once

#include <string>
#include <vector>

#include "guireplay/types.hpp"

namespace guireplay::pngio {

PixelImage read_png(const std::string& path);
void write_png(const std::string& path, const PixelImage& img);

/// In-memory variants used by the device adapter wire protocol.
PixelImage decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png(const PixelImage& img);

}  // namespace guireplay::pngio
