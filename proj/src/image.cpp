#include "foundad/image.hpp"

#include <algorithm>
#include <cmath>

#include "foundad/error.hpp"

namespace foundad {

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](std::uint8_t v) { return v != 0; }));
}

namespace {

struct Tap {
    int lo;
    int hi;
    float weight_hi;
};

std::vector<Tap> bilinear_taps(int in_size, int out_size) {
    std::vector<Tap> taps(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / out_size;
    for (int i = 0; i < out_size; ++i) {
        double src = (i + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
        const int lo = static_cast<int>(std::floor(src));
        const int hi = std::min(lo + 1, in_size - 1);
        taps[static_cast<std::size_t>(i)] = Tap{lo, hi, static_cast<float>(src - lo)};
    }
    return taps;
}

int nearest_index(int i, int in_size, int out_size) {
    const double src = (i + 0.5) * static_cast<double>(in_size) / out_size;
    return std::clamp(static_cast<int>(std::floor(src)), 0, in_size - 1);
}

}  // namespace

Image resize_bilinear(const Image& source, int out_height, int out_width) {
    if (out_height <= 0 || out_width <= 0 || source.height <= 0 || source.width <= 0) {
        fail(ErrorKind::InvalidArgument, "resize_bilinear: dimensions must be positive");
    }
    if (out_height == source.height && out_width == source.width) return source;

    const auto rows = bilinear_taps(source.height, out_height);
    const auto cols = bilinear_taps(source.width, out_width);
    Image out(out_height, out_width, source.channels);
    for (int y = 0; y < out_height; ++y) {
        const Tap& ty = rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_width; ++x) {
            const Tap& tx = cols[static_cast<std::size_t>(x)];
            for (int c = 0; c < source.channels; ++c) {
                const float top = source.at(ty.lo, tx.lo, c) * (1.0f - tx.weight_hi) + source.at(ty.lo, tx.hi, c) * tx.weight_hi;
                const float bottom = source.at(ty.hi, tx.lo, c) * (1.0f - tx.weight_hi) + source.at(ty.hi, tx.hi, c) * tx.weight_hi;
                out.at(y, x, c) = top * (1.0f - ty.weight_hi) + bottom * ty.weight_hi;
            }
        }
    }
    return out;
}

BinaryMask resize_nearest(const BinaryMask& source, int out_height, int out_width) {
    if (out_height <= 0 || out_width <= 0 || source.height <= 0 || source.width <= 0) {
        fail(ErrorKind::InvalidArgument, "resize_nearest: dimensions must be positive");
    }
    BinaryMask out(out_height, out_width);
    for (int y = 0; y < out_height; ++y) {
        const int sy = nearest_index(y, source.height, out_height);
        for (int x = 0; x < out_width; ++x) {
            out.at(y, x) = source.at(sy, nearest_index(x, source.width, out_width)) != 0 ? 1 : 0;
        }
    }
    return out;
}

Image to_grayscale(const Image& image) {
    Image gray(image.height, image.width, 1);
    const float inv = 1.0f / static_cast<float>(image.channels);
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        float sum = 0.0f;
        for (int c = 0; c < image.channels; ++c) sum += image.values[p * image.channels + c];
        gray.values[p] = sum * inv;
    }
    return gray;
}

}  // namespace foundad
