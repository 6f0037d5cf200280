#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace floodgen {

// 8-bit RGB PNG; `rgb` is row-major, 3 bytes per pixel, top row first.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace floodgen
