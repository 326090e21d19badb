#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace foundad {

/// Decoded 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels.
struct RawImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> bytes;
};

/// Decodes PNG (any bit depth, palette, alpha) or baseline JPEG. Alpha is
/// dropped, 16-bit samples are reduced to 8 bits. Throws Error(Io/Format)
/// naming the path on failure.
RawImage decode_image(const std::filesystem::path& path);

/// True when the file starts with a PNG or JPEG signature.
bool has_image_signature(const std::filesystem::path& path);

bool is_image_extension(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, int height, int width, int channels,
               std::span<const std::uint8_t> bytes);

/// 16-bit grayscale PNG; samples are big-endian on disk as PNG requires.
void write_png_gray16(const std::filesystem::path& path, int height, int width,
                      std::span<const std::uint16_t> samples);

}  // namespace foundad
