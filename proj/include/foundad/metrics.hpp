#pragma once

#include <string>
#include <vector>

#include "foundad/image.hpp"

namespace foundad {

/// Scores paired with binary labels (1 = anomalous).
struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> labels;

    void validate() const;
    std::size_t positives() const noexcept;
};

/// Rank-based AUROC (Mann-Whitney U) with average ranks for ties.
double auroc(const ScoredSet& set);

/// Step-wise average precision over a descending sweep; tied scores form a
/// single threshold.
double aupr(const ScoredSet& set);

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

/// ROC points (fpr, tpr) from (0,0) to (1,1), one per distinct score.
std::vector<CurvePoint> roc_curve(const ScoredSet& set);

/// Trapezoidal area under a curve sorted by x, from 0 to cap (interpolating
/// at the crossing), divided by cap.
double normalized_area(const std::vector<CurvePoint>& curve, double cap);

/// Per-image raw heatmaps (single-channel Image) with matching ground-truth masks.
struct ProInput {
    std::vector<Image> heatmaps;
    std::vector<BinaryMask> masks;

    void validate() const;
};

/// AUROC over every pixel pooled across images (full curve).
double pixel_auroc(const ProInput& input);

/// Pixel ROC area restricted to FPR <= cap, normalized by cap.
double pixel_auroc_capped(const ProInput& input, double fpr_cap);

struct ComponentLabels {
    int height = 0;
    int width = 0;
    int count = 0;
    std::vector<int> labels;  // 0 = background, 1..count in first-encounter raster order

    int at(int y, int x) const noexcept { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// 8-connected component labeling.
ComponentLabels connected_components(const BinaryMask& mask);

enum class ThresholdMode {
    Linear,  // n equally spaced thresholds between the pooled min and max
    Exact,   // every distinct pooled score
};

struct ProCurve {
    std::vector<CurvePoint> points;  // (fpr, pro), starting at (0, 0)
    double area = 0.0;               // normalized area up to the cap
};

ProCurve pro_curve(const ProInput& input, double fpr_cap = 0.3, int n_thresholds = 200,
                   ThresholdMode mode = ThresholdMode::Linear);

double pro(const ProInput& input, double fpr_cap = 0.3, int n_thresholds = 200,
           ThresholdMode mode = ThresholdMode::Linear);

struct CategoryMetrics {
    std::string category;
    double i_auroc = 0.0;
    double aupr = 0.0;
    double p_auroc = 0.0;
    double p_auroc_capped = 0.0;
    double pro = 0.0;
    std::vector<CurvePoint> image_roc;
    std::vector<CurvePoint> pro_curve;
};

struct MetricReport {
    double fpr_cap = 0.3;
    std::vector<CategoryMetrics> categories;
    CategoryMetrics mean;  // unweighted mean over categories; curves left empty

    /// category,i_auroc,aupr,p_auroc,pro in percent with one decimal.
    std::string to_csv() const;
    /// Full-precision summary including curve samples.
    std::string to_json() const;
};

struct EvaluationItem {
    std::string category;
    double image_score = 0.0;
    int label = 0;
    Image heatmap;
    BinaryMask mask;
};

/// Per-category image- and pixel-level metrics plus their unweighted mean.
MetricReport evaluate(const std::vector<EvaluationItem>& items, double fpr_cap = 0.3, int n_thresholds = 200);

}  // namespace foundad
