#include "floodgen/png_writer.hpp"

#include <cstring>

#include <zlib.h>

#include "floodgen/common.hpp"

namespace floodgen {

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  append_u32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.append(type, 4);
  out += payload;
  const auto crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data() + crc_start),
            static_cast<uInt>(out.size() - crc_start)));
  append_u32(out, crc);
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    fail(errc::bad_config, "raster dimensions do not match pixel buffer");

  // Scanlines with a leading filter byte of 0 (no filtering).
  const std::size_t stride = static_cast<std::size_t>(width) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    raw[static_cast<std::size_t>(y) * (stride + 1)] = 0;
    std::memcpy(raw.data() + static_cast<std::size_t>(y) * (stride + 1) + 1,
                rgb.data() + static_cast<std::size_t>(y) * stride, stride);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> deflated(bound);
  if (compress2(deflated.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK)
    fail(errc::io_failure, "deflate failed while encoding " + path);
  deflated.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  append_u32(ihdr, static_cast<std::uint32_t>(width));
  append_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT",
               std::string(reinterpret_cast<const char*>(deflated.data()), deflated.size()));
  append_chunk(out, "IEND", "");
  write_file_atomic(path, out);
}

}  // namespace floodgen
