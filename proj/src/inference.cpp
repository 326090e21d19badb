#include "foundad/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "foundad/error.hpp"

namespace foundad {

ScoreMap patch_scores(const PatchGrid& embedded, const PatchGrid& projected) {
    if (!embedded.same_shape(projected)) fail(ErrorKind::ShapeMismatch, "patch_scores: grids differ in shape");
    ScoreMap map{embedded.rows, embedded.cols, std::vector<float>(static_cast<std::size_t>(embedded.tokens()))};
    const auto dim = static_cast<std::size_t>(embedded.dim);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double diff = static_cast<double>(projected.values[i * dim + c]) - embedded.values[i * dim + c];
            sum += diff * diff;
        }
        map.values[i] = static_cast<float>(sum / static_cast<double>(dim));
    }
    return map;
}

ImageScore image_score(const ScoreMap& map, int k) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "Top-K needs K >= 1");
    if (map.values.empty()) fail(ErrorKind::InvalidArgument, "empty score map");
    std::vector<float> sorted = map.values;
    const auto used = std::min<std::size_t>(static_cast<std::size_t>(k), sorted.size());
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(used), sorted.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < used; ++i) sum += sorted[i];
    return ImageScore{sum / static_cast<double>(used), static_cast<int>(used)};
}

Image upsample_heatmap(const ScoreMap& map, int height, int width) {
    if (height < map.rows || width < map.cols) fail(ErrorKind::InvalidArgument, "heatmap target is smaller than the score map");
    Image plane(map.rows, map.cols, 1);
    plane.values = map.values;
    return resize_bilinear(plane, height, width);
}

Image gaussian_smooth(const Image& heatmap, double sigma) {
    if (sigma <= 0.0) return heatmap;
    if (heatmap.channels != 1) fail(ErrorKind::InvalidArgument, "gaussian_smooth expects a single-channel heatmap");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (int i = -radius; i <= radius; ++i) kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& v : kernel) v /= norm;

    auto pass = [&](const Image& in, bool horizontal) {
        Image out(in.height, in.width, 1);
        for (int y = 0; y < in.height; ++y) {
            for (int x = 0; x < in.width; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int sy = horizontal ? y : std::clamp(y + i, 0, in.height - 1);
                    const int sx = horizontal ? std::clamp(x + i, 0, in.width - 1) : x;
                    acc += kernel[static_cast<std::size_t>(i + radius)] * in.at(sy, sx);
                }
                out.at(y, x) = static_cast<float>(acc);
            }
        }
        return out;
    };
    return pass(pass(heatmap, true), false);
}

ScoreResult score_image(const ProjectorParams& params, const EmbeddingProvider& provider, const Image& pixels, int k,
                        std::string_view image_id, double smooth_sigma) {
    const PatchGrid embedded = provider.encodes_pixels() ? provider.encode(pixels) : provider.encode(image_id, pixels);
    if (embedded.dim != params.config.dim) {
        fail(ErrorKind::ShapeMismatch, "provider dim " + std::to_string(embedded.dim) + " does not match projector dim " +
                                           std::to_string(params.config.dim));
    }
    const PatchGrid projected = forward(params, embedded);
    ScoreResult result;
    result.patches = patch_scores(embedded, projected);
    result.score = image_score(result.patches, k);
    result.heatmap = gaussian_smooth(upsample_heatmap(result.patches, pixels.height, pixels.width), smooth_sigma);
    return result;
}

std::vector<std::uint16_t> heatmap_to_u16(const Image& heatmap) {
    std::vector<std::uint16_t> out(heatmap.values.size(), 0);
    if (heatmap.values.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(heatmap.values.begin(), heatmap.values.end());
    const double lo = *lo_it;
    const double span = static_cast<double>(*hi_it) - lo;
    if (span <= 0.0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint16_t>(std::lround((heatmap.values[i] - lo) / span * 65535.0));
    }
    return out;
}

}  // namespace foundad
