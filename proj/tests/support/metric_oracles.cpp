#include "metric_oracles.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stack>

namespace foundad::testing {

double auroc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
    double credit = 0;
    double pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1;
            if (scores[i] > scores[j]) credit += 1;
            else if (scores[i] == scores[j]) credit += 0.5;
        }
    }
    return credit / pairs;
}

double aupr_exhaustive(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
    double positives = 0;
    for (int l : labels) positives += l;
    double area = 0;
    double previous_recall = 0;
    for (double t : thresholds) {
        double tp = 0;
        double predicted = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                predicted += 1;
                tp += labels[i];
            }
        }
        const double recall = tp / positives;
        area += (recall - previous_recall) * (tp / predicted);
        previous_recall = recall;
    }
    return area;
}

std::vector<int> flood_fill_labels(const BinaryMask& mask, int* count) {
    std::vector<int> labels(mask.values.size(), 0);
    int next = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x) || labels[static_cast<std::size_t>(y) * mask.width + x]) continue;
            ++next;
            std::stack<std::pair<int, int>> todo;
            todo.push({y, x});
            labels[static_cast<std::size_t>(y) * mask.width + x] = next;
            while (!todo.empty()) {
                const auto [cy, cx] = todo.top();
                todo.pop();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = cy + dy;
                        const int nx = cx + dx;
                        if (ny < 0 || nx < 0 || ny >= mask.height || nx >= mask.width) continue;
                        const std::size_t k = static_cast<std::size_t>(ny) * mask.width + nx;
                        if (mask.values[k] && !labels[k]) {
                            labels[k] = next;
                            todo.push({ny, nx});
                        }
                    }
                }
            }
        }
    }
    if (count) *count = next;
    return labels;
}

double pro_exact_oracle(const std::vector<Image>& heatmaps, const std::vector<BinaryMask>& masks, double cap) {
    struct Region {
        std::size_t image;
        std::vector<std::size_t> pixels;
    };
    std::vector<Region> regions;
    std::set<double, std::greater<>> thresholds;
    double negatives = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        int count = 0;
        const auto labels = flood_fill_labels(masks[i], &count);
        std::vector<Region> local(static_cast<std::size_t>(count), Region{i, {}});
        for (std::size_t p = 0; p < labels.size(); ++p) {
            if (labels[p]) local[static_cast<std::size_t>(labels[p] - 1)].pixels.push_back(p);
            else negatives += 1;
            thresholds.insert(heatmaps[i].values[p]);
        }
        regions.insert(regions.end(), local.begin(), local.end());
    }

    std::vector<std::pair<double, double>> curve{{0.0, 0.0}};
    for (double t : thresholds) {
        double fp = 0;
        for (std::size_t i = 0; i < masks.size(); ++i)
            for (std::size_t p = 0; p < masks[i].values.size(); ++p)
                if (!masks[i].values[p] && heatmaps[i].values[p] >= t) fp += 1;
        double overlap = 0;
        for (const Region& r : regions) {
            double hit = 0;
            for (std::size_t p : r.pixels) hit += heatmaps[r.image].values[p] >= t ? 1 : 0;
            overlap += hit / static_cast<double>(r.pixels.size());
        }
        curve.push_back({fp / negatives, overlap / static_cast<double>(regions.size())});
    }

    double area = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto [x0, y0] = curve[i - 1];
        auto [x1, y1] = curve[i];
        if (x0 >= cap) break;
        if (x1 > cap) {
            y1 = y0 + (y1 - y0) * (cap - x0) / (x1 - x0);
            x1 = cap;
        }
        area += (x1 - x0) * (y0 + y1) / 2;
    }
    return area / cap;
}

}  // namespace foundad::testing
