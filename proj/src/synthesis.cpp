#include "foundad/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "foundad/error.hpp"
#include "foundad/metrics.hpp"

namespace foundad {

namespace {

/// Summed-area table in double; (h+1) x (w+1).
std::vector<double> integral_image(const Image& gray) {
    const int h = gray.height;
    const int w = gray.width;
    std::vector<double> table(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += gray.at(y, x);
            table[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] = table[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
        }
    }
    return table;
}

BinaryMask dilate3(const BinaryMask& in) {
    BinaryMask out(in.height, in.width);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            std::uint8_t v = 0;
            for (int dy = -1; dy <= 1 && !v; ++dy) {
                for (int dx = -1; dx <= 1 && !v; ++dx) {
                    const int ny = y + dy;
                    const int nx = x + dx;
                    if (ny >= 0 && nx >= 0 && ny < in.height && nx < in.width && in.at(ny, nx)) v = 1;
                }
            }
            out.at(y, x) = v;
        }
    }
    return out;
}

// Out-of-image neighbors are ignored so objects touching the border do not erode.
BinaryMask erode3(const BinaryMask& in) {
    BinaryMask out(in.height, in.width);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            std::uint8_t v = 1;
            for (int dy = -1; dy <= 1 && v; ++dy) {
                for (int dx = -1; dx <= 1 && v; ++dx) {
                    const int ny = y + dy;
                    const int nx = x + dx;
                    if (ny >= 0 && nx >= 0 && ny < in.height && nx < in.width && !in.at(ny, nx)) v = 0;
                }
            }
            out.at(y, x) = v;
        }
    }
    return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
    const ComponentLabels labels = connected_components(mask);
    BinaryMask out(mask.height, mask.width);
    if (labels.count == 0) return out;
    std::vector<std::size_t> sizes(static_cast<std::size_t>(labels.count) + 1, 0);
    for (int l : labels.labels) ++sizes[static_cast<std::size_t>(l)];
    // first-encounter order breaks ties
    int best = 1;
    for (int l = 2; l <= labels.count; ++l) {
        if (sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
    }
    for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] = labels.labels[p] == best ? 1 : 0;
    return out;
}

// Background pixels not 4-connected to the image border become foreground.
BinaryMask fill_holes(const BinaryMask& mask) {
    const int h = mask.height;
    const int w = mask.width;
    BinaryMask outside(h, w);
    std::deque<std::pair<int, int>> frontier;
    auto seed = [&](int y, int x) {
        if (!mask.at(y, x) && !outside.at(y, x)) {
            outside.at(y, x) = 1;
            frontier.emplace_back(y, x);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(0, x);
        seed(h - 1, x);
    }
    for (int y = 0; y < h; ++y) {
        seed(y, 0);
        seed(y, w - 1);
    }
    constexpr int kDy[] = {-1, 1, 0, 0};
    constexpr int kDx[] = {0, 0, -1, 1};
    while (!frontier.empty()) {
        const auto [y, x] = frontier.front();
        frontier.pop_front();
        for (int d = 0; d < 4; ++d) {
            const int ny = y + kDy[d];
            const int nx = x + kDx[d];
            if (ny >= 0 && nx >= 0 && ny < h && nx < w) seed(ny, nx);
        }
    }
    BinaryMask out(h, w);
    for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] = outside.values[p] ? 0 : 1;
    return out;
}

}  // namespace

ForegroundMask binarize_foreground(const Image& image, const ForegroundParams& params) {
    if (image.empty()) fail(ErrorKind::InvalidArgument, "binarize_foreground: empty image");
    const Image gray = to_grayscale(image);
    const int h = gray.height;
    const int w = gray.width;
    const auto table = integral_image(gray);
    const int radius = params.block / 2;

    BinaryMask brighter(h, w);
    BinaryMask darker(h, w);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(h, y + radius + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w, x + radius + 1);
            const double sum = table[static_cast<std::size_t>(y1) * (w + 1) + x1] - table[static_cast<std::size_t>(y0) * (w + 1) + x1] -
                               table[static_cast<std::size_t>(y1) * (w + 1) + x0] + table[static_cast<std::size_t>(y0) * (w + 1) + x0];
            const double mean = sum / static_cast<double>((y1 - y0) * (x1 - x0));
            const double diff = static_cast<double>(gray.at(y, x)) - mean;
            brighter.at(y, x) = diff > params.offset ? 1 : 0;
            darker.at(y, x) = -diff > params.offset ? 1 : 0;
        }
    }

    double total = 0.0;
    double band = 0.0;
    std::size_t band_count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = gray.at(y, x);
            total += v;
            if (y < params.border || x < params.border || y >= h - params.border || x >= w - params.border) {
                band += v;
                ++band_count;
            }
        }
    }
    const double global_mean = total / static_cast<double>(gray.pixel_count());
    const double band_mean = band_count ? band / static_cast<double>(band_count) : global_mean;
    const BinaryMask& raw = band_mean <= global_mean ? brighter : darker;

    ForegroundMask result;
    result.mask = fill_holes(largest_component(erode3(dilate3(raw))));
    if (static_cast<double>(result.mask.count()) < params.min_fraction * static_cast<double>(result.mask.pixel_count())) {
        result.mask = BinaryMask(h, w, 1);
        result.fallback = true;
    }
    return result;
}

void SynthesisParams::validate() const {
    if (!(area_lo > 0.0 && area_lo <= area_hi && area_hi < 1.0)) {
        fail(ErrorKind::InvalidArgument, "area ratio range must satisfy 0 < lo <= hi < 1");
    }
    if (!(aspect_lo > 0.0 && aspect_lo <= aspect_hi) || std::abs(std::log(aspect_lo) + std::log(aspect_hi)) > 1e-9) {
        fail(ErrorKind::InvalidArgument, "aspect ratio range must be symmetric in log space");
    }
    if (max_attempts < 1) fail(ErrorKind::InvalidArgument, "max_attempts must be positive");
}

Rect Rect::clipped(int image_height, int image_width) const noexcept {
    const int x0 = std::clamp(x, 0, image_width);
    const int y0 = std::clamp(y, 0, image_height);
    const int x1 = std::clamp(x + width, 0, image_width);
    const int y1 = std::clamp(y + height, 0, image_height);
    return Rect{x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

SynthesisResult synthesize_anomaly(const Image& image, const ForegroundMask& foreground, const SynthesisParams& params,
                                   SplitMix64& rng, std::optional<Point> center) {
    params.validate();
    const int h = image.height;
    const int w = image.width;
    if (foreground.mask.height != h || foreground.mask.width != w) {
        fail(ErrorKind::ShapeMismatch, "foreground mask does not match image dimensions");
    }
    if (foreground.mask.count() == 0 && !center) fail(ErrorKind::InvalidArgument, "foreground mask is empty");

    const double area = rng.uniform(params.area_lo, params.area_hi) * static_cast<double>(h) * w;
    const double aspect = std::exp(rng.uniform(std::log(params.aspect_lo), std::log(params.aspect_hi)));
    const int paste_w = std::max(1, static_cast<int>(std::floor(std::sqrt(area * aspect))));
    const int paste_h = std::max(1, static_cast<int>(std::floor(std::sqrt(area / aspect))));
    const int turns = params.rotate ? static_cast<int>(rng.below(4)) : 0;
    const int cut_w = turns % 2 ? paste_h : paste_w;
    const int cut_h = turns % 2 ? paste_w : paste_h;
    if (cut_w > w || cut_h > h || paste_w > w || paste_h > h) fail(ErrorKind::InvalidArgument, "area ratio too large for image");

    SynthesisResult result;
    result.quarter_turns = turns;
    result.src_rect = Rect{static_cast<int>(rng.below(static_cast<std::uint64_t>(w - cut_w + 1))),
                           static_cast<int>(rng.below(static_cast<std::uint64_t>(h - cut_h + 1))), cut_w, cut_h};

    Point dst{};
    if (center) {
        dst = *center;
    } else {
        result.best_effort = true;
        for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
            dst.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(w)));
            dst.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
            if (foreground.mask.at(dst.y, dst.x)) {
                result.best_effort = false;
                break;
            }
        }
    }
    result.dst_rect = Rect{dst.x - paste_w / 2, dst.y - paste_h / 2, paste_w, paste_h};

    result.image = image;
    result.anomaly_mask = BinaryMask(h, w);
    const Rect& src = result.src_rect;
    for (int dy = 0; dy < paste_h; ++dy) {
        const int y = result.dst_rect.y + dy;
        if (y < 0 || y >= h) continue;
        for (int dx = 0; dx < paste_w; ++dx) {
            const int x = result.dst_rect.x + dx;
            if (x < 0 || x >= w) continue;
            int sx = dx;
            int sy = dy;
            switch (turns) {
                case 1: sx = dy; sy = cut_h - 1 - dx; break;
                case 2: sx = cut_w - 1 - dx; sy = cut_h - 1 - dy; break;
                case 3: sx = cut_w - 1 - dy; sy = dx; break;
                default: break;
            }
            for (int c = 0; c < image.channels; ++c) result.image.at(y, x, c) = image.at(src.y + sy, src.x + sx, c);
            result.anomaly_mask.at(y, x) = 1;
        }
    }
    return result;
}

GateResult gate_synthesis(const Image& image, double sigma, const SynthesisParams& params,
                          const ForegroundMask& foreground, SplitMix64& rng) {
    if (!(sigma >= 0.0 && sigma <= 1.0)) fail(ErrorKind::InvalidArgument, "sigma must lie in [0, 1]");
    GateResult gate;
    // uniform01 lies in [0, 1), so sigma = 1 never synthesizes and sigma = 0 always does.
    gate.synthesized = rng.uniform01() < 1.0 - sigma;
    if (!gate.synthesized) {
        gate.image = image;
        gate.anomaly_mask = BinaryMask(image.height, image.width);
        return gate;
    }
    SynthesisResult synth = synthesize_anomaly(image, foreground, params, rng);
    gate.image = std::move(synth.image);
    gate.anomaly_mask = std::move(synth.anomaly_mask);
    return gate;
}

}  // namespace foundad
