#pragma once

#include <string_view>
#include <vector>

#include "foundad/embedding.hpp"
#include "foundad/image.hpp"
#include "foundad/projector.hpp"

namespace foundad {

/// Non-negative per-patch anomaly scores, row-major.
struct ScoreMap {
    int rows = 0;
    int cols = 0;
    std::vector<float> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// s_i = (1/dim) * sum_c (projected_{i,c} - embedded_{i,c})^2 for every patch i.
ScoreMap patch_scores(const PatchGrid& embedded, const PatchGrid& projected);

struct ImageScore {
    double value = 0.0;
    int k_used = 0;
};

/// Mean of the min(K, N) largest patch scores.
ImageScore image_score(const ScoreMap& map, int k);

/// Bilinear upsampling (half-pixel centers) to height x width; single-channel image.
Image upsample_heatmap(const ScoreMap& map, int height, int width);

/// Separable Gaussian blur with a +-3 sigma kernel and clamped borders.
Image gaussian_smooth(const Image& heatmap, double sigma);

struct ScoreResult {
    ImageScore score;
    ScoreMap patches;
    Image heatmap;
};

/// encode -> project -> patch scores -> (Top-K score, heatmap at the image
/// resolution). `image_id` is needed for file providers. smooth_sigma <= 0
/// leaves the heatmap unsmoothed.
ScoreResult score_image(const ProjectorParams& params, const EmbeddingProvider& provider, const Image& pixels, int k,
                        std::string_view image_id = {}, double smooth_sigma = 0.0);

/// Per-image min-max scaling to 16-bit samples, for PNG export only.
std::vector<std::uint16_t> heatmap_to_u16(const Image& heatmap);

}  // namespace foundad
