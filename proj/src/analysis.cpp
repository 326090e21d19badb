#include "foundad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>

#include "foundad/error.hpp"
#include "foundad/training.hpp"

namespace foundad {

Point deepest_foreground_point(const BinaryMask& fg) {
    const int h = fg.height;
    const int w = fg.width;
    // multi-source BFS from background pixels and the virtual frame around the image
    std::vector<int> dist(static_cast<std::size_t>(h) * w, -1);
    std::deque<std::pair<int, int>> frontier;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool on_frame = y == 0 || x == 0 || y == h - 1 || x == w - 1;
            if (!fg.at(y, x)) {
                dist[static_cast<std::size_t>(y) * w + x] = 0;
                frontier.emplace_back(y, x);
            } else if (on_frame) {
                dist[static_cast<std::size_t>(y) * w + x] = 1;
                frontier.emplace_back(y, x);
            }
        }
    }
    // the BFS queue must stay ordered by distance; stable sort keeps raster order within a level
    std::stable_sort(frontier.begin(), frontier.end(), [&](const auto& a, const auto& b) {
        return dist[static_cast<std::size_t>(a.first) * w + a.second] < dist[static_cast<std::size_t>(b.first) * w + b.second];
    });
    while (!frontier.empty()) {
        const auto [y, x] = frontier.front();
        frontier.pop_front();
        const int d = dist[static_cast<std::size_t>(y) * w + x];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int ny = y + dy;
                const int nx = x + dx;
                if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                int& nd = dist[static_cast<std::size_t>(ny) * w + nx];
                if (nd >= 0) continue;
                nd = d + 1;
                frontier.emplace_back(ny, nx);
            }
        }
    }
    Point best{w / 2, h / 2};
    int best_distance = -1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int d = dist[static_cast<std::size_t>(y) * w + x];
            if (fg.at(y, x) && d > best_distance) {
                best_distance = d;
                best = Point{x, y};
            }
        }
    }
    return best;
}

DistanceSeries distance_vs_area(const Image& image, const EmbeddingProvider& provider, std::span<const double> area_ratios,
                                std::uint64_t seed) {
    if (area_ratios.empty()) fail(ErrorKind::InvalidArgument, "no area ratios given");
    for (std::size_t i = 0; i < area_ratios.size(); ++i) {
        if (!(area_ratios[i] >= 0.0 && area_ratios[i] < 1.0)) fail(ErrorKind::InvalidArgument, "area ratios must lie in [0, 1)");
        if (i > 0 && !(area_ratios[i] > area_ratios[i - 1])) fail(ErrorKind::InvalidArgument, "area ratios must be strictly increasing");
    }
    const PatchGrid reference = provider.encode(image);
    const ForegroundMask foreground = binarize_foreground(image);
    const Point center = deepest_foreground_point(foreground.mask);

    DistanceSeries series;
    for (double ratio : area_ratios) {
        if (ratio == 0.0) {
            series.push_back({0, 0.0});
            continue;
        }
        SynthesisParams params;
        params.area_lo = params.area_hi = ratio;
        params.aspect_lo = params.aspect_hi = 1.0;
        SplitMix64 rng(seed);
        const SynthesisResult synth = synthesize_anomaly(image, foreground, params, rng, center);
        const auto count = static_cast<long long>(synth.anomaly_mask.count());
        if (!series.empty() && count <= series.back().pixel_count) {
            fail(ErrorKind::InvalidArgument, "area ratios too close: anomaly pixel count did not increase at ratio " + std::to_string(ratio));
        }
        series.push_back({count, manifold_loss(provider.encode(synth.image), reference)});
    }
    return series;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
        i = j;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::ShapeMismatch, "spearman: series differ in length");
    if (x.size() < 3) fail(ErrorKind::InvalidArgument, "spearman needs at least 3 points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) fail(ErrorKind::InvalidArgument, "spearman undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const DistanceSeries& series) {
    std::vector<double> counts;
    std::vector<double> distances;
    for (const auto& p : series) {
        counts.push_back(static_cast<double>(p.pixel_count));
        distances.push_back(p.distance);
    }
    return spearman(counts, distances);
}

std::string distance_series_csv(const DistanceSeries& series) {
    std::ostringstream out;
    out << "# distance = mean over patches x channels of (f_s - f_r)^2\n";
    out << "pixel_count,distance\n";
    char buffer[40];
    for (const auto& p : series) {
        std::snprintf(buffer, sizeof(buffer), "%.9g", p.distance);
        out << p.pixel_count << ',' << buffer << '\n';
    }
    return out.str();
}

std::vector<std::uint8_t> render_scatter(const DistanceSeries& series, int height, int width) {
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(height) * width * 3, 255);
    auto put = [&](int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        if (y < 0 || x < 0 || y >= height || x >= width) return;
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    };
    const int margin = 20;
    for (int x = margin; x < width - margin; ++x) put(height - margin, x, 0, 0, 0);
    for (int y = margin; y <= height - margin; ++y) put(y, margin, 0, 0, 0);
    if (series.empty()) return rgb;

    long long max_count = 1;
    double max_distance = 0.0;
    for (const auto& p : series) {
        max_count = std::max(max_count, p.pixel_count);
        max_distance = std::max(max_distance, p.distance);
    }
    if (max_distance <= 0.0) max_distance = 1.0;
    const double span_x = width - 2.0 * margin - 4;
    const double span_y = height - 2.0 * margin - 4;
    for (const auto& p : series) {
        const int cx = margin + 2 + static_cast<int>(std::lround(span_x * static_cast<double>(p.pixel_count) / static_cast<double>(max_count)));
        const int cy = height - margin - 2 - static_cast<int>(std::lround(span_y * p.distance / max_distance));
        for (int dy = -2; dy <= 2; ++dy) {
            for (int dx = -2; dx <= 2; ++dx) put(cy + dy, cx + dx, 200, 30, 30);
        }
    }
    return rgb;
}

}  // namespace foundad
