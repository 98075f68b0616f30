#pragma once

#include <string>

#include "terrain/ingest.hpp"

namespace terrain {

// Reads any 8-bit PNG (gray, palette, RGB, RGBA) as RGB.
Image read_png(const std::string& path);

void write_png(const std::string& path, const Image& image);

}  // namespace terrain
