#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "voebench/renderer.hpp"

namespace voebench {

using Bytes = std::vector<std::uint8_t>;

/// rgb is height x (3 * width), interleaved.
Bytes encode_png_rgb(const Plane<std::uint8_t>& rgb);
Bytes encode_png_gray8(const Plane<std::uint8_t>& img);
Bytes encode_png_gray16(const Plane<std::uint16_t>& img);

/// Decoders reject images whose color type or bit depth does not match. ParseError on
/// malformed data.
Plane<std::uint8_t> decode_png_rgb(const Bytes& png);
Plane<std::uint8_t> decode_png_gray8(const Bytes& png);
Plane<std::uint16_t> decode_png_gray16(const Bytes& png);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace voebench
