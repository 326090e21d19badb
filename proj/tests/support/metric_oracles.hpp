#pragma once

#include <vector>

#include "foundad/image.hpp"

namespace foundad::testing {

/// O(n^2) Mann-Whitney: fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half.
double auroc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels);

/// Average precision by enumerating every distinct threshold:
/// sum over thresholds of (recall_t - recall_prev) * precision_t.
double aupr_exhaustive(const std::vector<double>& scores, const std::vector<int>& labels);

/// 8-connected labels by iterative flood fill, 0 = background.
std::vector<int> flood_fill_labels(const BinaryMask& mask, int* count);

/// PRO with one threshold per distinct pooled score (prediction: score >=
/// threshold), curve starting at (0, 0), trapezoidal area up to the cap with
/// linear interpolation at the crossing, divided by the cap.
double pro_exact_oracle(const std::vector<Image>& heatmaps, const std::vector<BinaryMask>& masks, double cap);

}  // namespace foundad::testing
