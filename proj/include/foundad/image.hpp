#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace foundad {

/// Interleaved (HWC) floating-point image. Pixel values are expected in [0, 1]
/// for RGB data; single-channel instances double as score planes.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> values;

    Image() = default;
    Image(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c), values(static_cast<std::size_t>(h) * w * c, fill) {}

    std::size_t index(int y, int x, int c = 0) const noexcept {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    float& at(int y, int x, int c = 0) noexcept { return values[index(y, x, c)]; }
    float at(int y, int x, int c = 0) const noexcept { return values[index(y, x, c)]; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height) * width; }
    bool empty() const noexcept { return values.empty(); }
};

/// Row-major binary mask with values in {0, 1}.
struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> values;

    BinaryMask() = default;
    BinaryMask(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

    std::uint8_t& at(int y, int x) noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const noexcept;
    std::size_t pixel_count() const noexcept { return values.size(); }
};

/// Bilinear resize with half-pixel sample centers: destination pixel x samples
/// source coordinate (x + 0.5) * in_w / out_w - 0.5, clamped to the valid range.
Image resize_bilinear(const Image& source, int out_height, int out_width);

/// Nearest-neighbor resize: destination x reads source floor((x + 0.5) * in_w / out_w).
BinaryMask resize_nearest(const BinaryMask& source, int out_height, int out_width);

/// Per-pixel mean of the channels.
Image to_grayscale(const Image& image);

}  // namespace foundad
