#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foundad/embedding.hpp"
#include "foundad/image.hpp"
#include "foundad/synthesis.hpp"

namespace foundad {

struct DistancePoint {
    long long pixel_count = 0;
    double distance = 0.0;
};

using DistanceSeries = std::vector<DistancePoint>;

/// Foreground pixel farthest (chessboard distance) from background and the
/// image border; ties go to the first pixel in raster order.
Point deepest_foreground_point(const BinaryMask& foreground);

/// Feature displacement of nested square pastes of growing area. Every paste
/// shares one destination center, so the anomalous regions nest. A ratio of 0
/// yields the (0, 0) point. The distance is the element-mean squared difference
/// between encode(synthesized) and encode(image), the training loss.
DistanceSeries distance_vs_area(const Image& image, const EmbeddingProvider& provider, std::span<const double> area_ratios,
                                std::uint64_t seed);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);
double spearman(const DistanceSeries& series);

/// count,distance rows preceded by a comment naming the distance convention.
std::string distance_series_csv(const DistanceSeries& series);

/// Simple scatter plot (white background, black axes, dots) as 8-bit RGB.
std::vector<std::uint8_t> render_scatter(const DistanceSeries& series, int height, int width);

}  // namespace foundad
