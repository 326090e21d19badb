#include "foundad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "foundad/error.hpp"

namespace foundad {

namespace {

std::vector<std::size_t> order_descending(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorKind::Numeric, std::string(what) + " contains a non-finite score");
    }
}

}  // namespace

void ScoredSet::validate() const {
    if (scores.size() != labels.size()) fail(ErrorKind::ShapeMismatch, "scores and labels differ in length");
    for (int label : labels) {
        if (label != 0 && label != 1) fail(ErrorKind::InvalidArgument, "labels must be 0 or 1");
    }
    require_finite(scores, "scored set");
}

std::size_t ScoredSet::positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

double auroc(const ScoredSet& set) {
    set.validate();
    const std::size_t pos = set.positives();
    const std::size_t neg = set.labels.size() - pos;
    if (pos == 0 || neg == 0) fail(ErrorKind::InvalidArgument, "AUROC undefined: both classes must be present");

    std::vector<std::size_t> order(set.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return set.scores[a] < set.scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && set.scores[order[j]] == set.scores[order[i]]) ++j;
        // ranks i+1 .. j share their average
        const double average_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (set.labels[order[t]] == 1) positive_rank_sum += average_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

double aupr(const ScoredSet& set) {
    set.validate();
    const std::size_t pos = set.positives();
    if (pos == 0) fail(ErrorKind::InvalidArgument, "AUPR undefined: no positive samples");

    const auto order = order_descending(set.scores);
    double area = 0.0;
    double tp = 0.0;
    double fp = 0.0;
    double previous_recall = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && set.scores[order[j]] == set.scores[order[i]]) {
            (set.labels[order[j]] == 1 ? tp : fp) += 1.0;
            ++j;
        }
        const double recall = tp / static_cast<double>(pos);
        area += (recall - previous_recall) * (tp / (tp + fp));
        previous_recall = recall;
        i = j;
    }
    return area;
}

std::vector<CurvePoint> roc_curve(const ScoredSet& set) {
    set.validate();
    const double pos = static_cast<double>(set.positives());
    const double neg = static_cast<double>(set.labels.size()) - pos;
    if (pos == 0 || neg == 0) fail(ErrorKind::InvalidArgument, "ROC undefined: both classes must be present");

    const auto order = order_descending(set.scores);
    std::vector<CurvePoint> curve{{0.0, 0.0}};
    double tp = 0.0;
    double fp = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && set.scores[order[j]] == set.scores[order[i]]) {
            (set.labels[order[j]] == 1 ? tp : fp) += 1.0;
            ++j;
        }
        curve.push_back({fp / neg, tp / pos});
        i = j;
    }
    return curve;
}

double normalized_area(const std::vector<CurvePoint>& curve, double cap) {
    if (!(cap > 0.0)) fail(ErrorKind::InvalidArgument, "curve cap must be positive");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const CurvePoint& a = curve[i - 1];
        const CurvePoint& b = curve[i];
        if (a.x >= cap) break;
        if (b.x <= cap) {
            area += 0.5 * (a.y + b.y) * (b.x - a.x);
            continue;
        }
        const double t = (cap - a.x) / (b.x - a.x);
        const double y_cap = a.y + t * (b.y - a.y);
        area += 0.5 * (a.y + y_cap) * (cap - a.x);
        break;
    }
    return area / cap;
}

void ProInput::validate() const {
    if (heatmaps.size() != masks.size()) fail(ErrorKind::ShapeMismatch, "heatmap and mask counts differ");
    if (heatmaps.empty()) fail(ErrorKind::InvalidArgument, "no images supplied");
    for (std::size_t i = 0; i < heatmaps.size(); ++i) {
        const Image& h = heatmaps[i];
        if (h.channels != 1 || h.height != masks[i].height || h.width != masks[i].width) {
            fail(ErrorKind::ShapeMismatch, "heatmap " + std::to_string(i) + " does not match its mask");
        }
        for (float v : h.values) {
            if (!std::isfinite(v)) fail(ErrorKind::Numeric, "heatmap " + std::to_string(i) + " has non-finite values");
        }
    }
}

namespace {

ScoredSet pooled_pixels(const ProInput& input) {
    input.validate();
    ScoredSet set;
    for (std::size_t i = 0; i < input.heatmaps.size(); ++i) {
        const auto& h = input.heatmaps[i].values;
        const auto& m = input.masks[i].values;
        set.scores.insert(set.scores.end(), h.begin(), h.end());
        for (std::uint8_t v : m) set.labels.push_back(v != 0 ? 1 : 0);
    }
    return set;
}

}  // namespace

double pixel_auroc(const ProInput& input) { return auroc(pooled_pixels(input)); }

double pixel_auroc_capped(const ProInput& input, double fpr_cap) {
    return normalized_area(roc_curve(pooled_pixels(input)), fpr_cap);
}

ComponentLabels connected_components(const BinaryMask& mask) {
    ComponentLabels out;
    out.height = mask.height;
    out.width = mask.width;
    out.labels.assign(mask.values.size(), 0);
    std::deque<std::pair<int, int>> frontier;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(y, x) == 0 || out.at(y, x) != 0) continue;
            const int label = ++out.count;
            out.labels[static_cast<std::size_t>(y) * mask.width + x] = label;
            frontier.emplace_back(y, x);
            while (!frontier.empty()) {
                const auto [cy, cx] = frontier.front();
                frontier.pop_front();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = cy + dy;
                        const int nx = cx + dx;
                        if (ny < 0 || nx < 0 || ny >= mask.height || nx >= mask.width) continue;
                        const std::size_t idx = static_cast<std::size_t>(ny) * mask.width + nx;
                        if (mask.values[idx] == 0 || out.labels[idx] != 0) continue;
                        out.labels[idx] = label;
                        frontier.emplace_back(ny, nx);
                    }
                }
            }
        }
    }
    return out;
}

ProCurve pro_curve(const ProInput& input, double fpr_cap, int n_thresholds, ThresholdMode mode) {
    input.validate();
    if (!(fpr_cap > 0.0 && fpr_cap <= 1.0)) fail(ErrorKind::InvalidArgument, "fpr cap must lie in (0, 1]");
    if (mode == ThresholdMode::Linear && n_thresholds < 2) fail(ErrorKind::InvalidArgument, "need at least 2 thresholds");

    // Pool pixels with a global region id (0 for normal pixels).
    std::vector<double> scores;
    std::vector<int> region;
    std::vector<double> inverse_region_size{0.0};
    for (std::size_t i = 0; i < input.heatmaps.size(); ++i) {
        const ComponentLabels labels = connected_components(input.masks[i]);
        const int offset = static_cast<int>(inverse_region_size.size()) - 1;
        std::vector<std::size_t> sizes(static_cast<std::size_t>(labels.count) + 1, 0);
        for (int l : labels.labels) ++sizes[static_cast<std::size_t>(l)];
        for (int l = 1; l <= labels.count; ++l) inverse_region_size.push_back(1.0 / static_cast<double>(sizes[l]));
        const auto& h = input.heatmaps[i].values;
        for (std::size_t p = 0; p < h.size(); ++p) {
            scores.push_back(h[p]);
            region.push_back(labels.labels[p] == 0 ? 0 : labels.labels[p] + offset);
        }
    }
    const std::size_t region_count = inverse_region_size.size() - 1;
    const auto normal_count = static_cast<double>(std::count(region.begin(), region.end(), 0));
    if (region_count == 0) fail(ErrorKind::InvalidArgument, "PRO undefined: no ground-truth regions");
    if (normal_count == 0) fail(ErrorKind::InvalidArgument, "PRO undefined: no normal pixels");

    const auto order = order_descending(scores);
    std::vector<double> thresholds;
    if (mode == ThresholdMode::Exact) {
        for (std::size_t idx : order) {
            if (thresholds.empty() || scores[idx] != thresholds.back()) thresholds.push_back(scores[idx]);
        }
    } else {
        const double hi = scores[order.front()];
        const double lo = scores[order.back()];
        const double step = (hi - lo) / static_cast<double>(n_thresholds - 1);
        for (int i = 0; i < n_thresholds; ++i) thresholds.push_back(i + 1 == n_thresholds ? lo : hi - step * i);
    }

    ProCurve curve;
    curve.points.push_back({0.0, 0.0});
    double overlap_sum = 0.0;
    double false_positives = 0.0;
    std::size_t cursor = 0;
    for (double t : thresholds) {
        while (cursor < order.size() && scores[order[cursor]] >= t) {
            const int r = region[order[cursor]];
            if (r == 0) {
                false_positives += 1.0;
            } else {
                overlap_sum += inverse_region_size[static_cast<std::size_t>(r)];
            }
            ++cursor;
        }
        curve.points.push_back({false_positives / normal_count, overlap_sum / static_cast<double>(region_count)});
    }
    curve.area = normalized_area(curve.points, fpr_cap);
    return curve;
}

double pro(const ProInput& input, double fpr_cap, int n_thresholds, ThresholdMode mode) {
    return pro_curve(input, fpr_cap, n_thresholds, mode).area;
}

namespace {

std::string percent(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f", value * 100.0);
    return buffer;
}

nlohmann::ordered_json curve_json(const std::vector<CurvePoint>& curve) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : curve) arr.push_back({p.x, p.y});
    return arr;
}

nlohmann::ordered_json category_json(const CategoryMetrics& m) {
    nlohmann::ordered_json doc;
    doc["category"] = m.category;
    doc["i_auroc"] = m.i_auroc;
    doc["aupr"] = m.aupr;
    doc["p_auroc"] = m.p_auroc;
    doc["p_auroc_capped"] = m.p_auroc_capped;
    doc["pro"] = m.pro;
    if (!m.image_roc.empty()) doc["image_roc"] = curve_json(m.image_roc);
    if (!m.pro_curve.empty()) doc["pro_curve"] = curve_json(m.pro_curve);
    return doc;
}

}  // namespace

std::string MetricReport::to_csv() const {
    std::ostringstream out;
    out << "category,i_auroc,aupr,p_auroc,pro\n";
    auto row = [&](const CategoryMetrics& m) {
        out << m.category << ',' << percent(m.i_auroc) << ',' << percent(m.aupr) << ',' << percent(m.p_auroc) << ','
            << percent(m.pro) << '\n';
    };
    for (const auto& m : categories) row(m);
    row(mean);
    return out.str();
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["fpr_cap"] = fpr_cap;
    doc["note"] = "p_auroc is the full-curve pixel AUROC; p_auroc_capped integrates the pixel ROC up to fpr_cap";
    doc["mean"] = category_json(mean);
    nlohmann::ordered_json cats = nlohmann::ordered_json::array();
    for (const auto& m : categories) cats.push_back(category_json(m));
    doc["categories"] = std::move(cats);
    return doc.dump(2) + "\n";
}

MetricReport evaluate(const std::vector<EvaluationItem>& items, double fpr_cap, int n_thresholds) {
    std::map<std::string, std::vector<const EvaluationItem*>> grouped;
    for (const auto& item : items) grouped[item.category].push_back(&item);
    if (grouped.empty()) fail(ErrorKind::InvalidArgument, "nothing to evaluate");

    MetricReport report;
    report.fpr_cap = fpr_cap;
    report.mean.category = "mean";
    for (const auto& [name, group] : grouped) {
        ScoredSet set;
        ProInput pixels;
        for (const EvaluationItem* item : group) {
            set.scores.push_back(item->image_score);
            set.labels.push_back(item->label);
            pixels.heatmaps.push_back(item->heatmap);
            pixels.masks.push_back(item->mask);
        }
        CategoryMetrics m;
        m.category = name;
        try {
            m.i_auroc = auroc(set);
            m.aupr = aupr(set);
            m.image_roc = roc_curve(set);
            m.p_auroc = pixel_auroc(pixels);
            m.p_auroc_capped = pixel_auroc_capped(pixels, fpr_cap);
            const ProCurve curve = pro_curve(pixels, fpr_cap, n_thresholds);
            m.pro = curve.area;
            m.pro_curve = curve.points;
        } catch (const Error& e) {
            fail(e.kind(), "category " + name + ": " + e.what());
        }
        report.mean.i_auroc += m.i_auroc;
        report.mean.aupr += m.aupr;
        report.mean.p_auroc += m.p_auroc;
        report.mean.p_auroc_capped += m.p_auroc_capped;
        report.mean.pro += m.pro;
        report.categories.push_back(std::move(m));
    }
    const double n = static_cast<double>(report.categories.size());
    report.mean.i_auroc /= n;
    report.mean.aupr /= n;
    report.mean.p_auroc /= n;
    report.mean.p_auroc_capped /= n;
    report.mean.pro /= n;
    return report;
}

}  // namespace foundad
