#pragma once

#include <optional>

#include "foundad/dataset.hpp"
#include "foundad/image.hpp"
#include "foundad/rng.hpp"

namespace foundad {

struct ForegroundMask {
    BinaryMask mask;
    bool fallback = false;  // true when the all-foreground fallback fired
};

struct ForegroundParams {
    int block = 33;
    float offset = 0.02f;
    int border = 4;
    double min_fraction = 0.01;
};

/// Adaptive binarization of the object region.
///
/// A pixel is "brighter" when gray - local_mean > offset and "darker" when
/// local_mean - gray > offset, with the mean taken over a block x block window
/// clipped to the image. The polarity is picked from the border band: a band
/// darker than the whole image means bright objects on a dark background and
/// vice versa, which leaves the band majority background. The chosen map is
/// closed (3x3), reduced to its largest 8-connected component and its enclosed
/// holes are filled. Under min_fraction foreground pixels every pixel becomes
/// foreground.
ForegroundMask binarize_foreground(const Image& image, const ForegroundParams& params = {});

struct SynthesisParams {
    double area_lo = 0.02;
    double area_hi = 0.15;
    double aspect_lo = 0.3;
    double aspect_hi = 1.0 / 0.3;
    int max_attempts = 50;
    bool rotate = false;

    void validate() const;
};

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    long long area() const noexcept { return static_cast<long long>(width) * height; }
    Rect clipped(int image_height, int image_width) const noexcept;
    bool operator==(const Rect&) const = default;
};

struct Point {
    int x = 0;
    int y = 0;
};

struct SynthesisResult {
    Image image;
    BinaryMask anomaly_mask;  // dst_rect clipped to the image
    Rect src_rect;
    Rect dst_rect;            // unclipped; may extend past the border
    int quarter_turns = 0;    // rotation applied to the pasted patch
    bool best_effort = false; // no foreground center found within max_attempts
};

/// CutPaste-style structural anomaly: cut a rectangle from the image and
/// paste it centered on a foreground pixel. When `center` is supplied the
/// foreground search is skipped and the patch is pasted there.
SynthesisResult synthesize_anomaly(const Image& image, const ForegroundMask& foreground, const SynthesisParams& params,
                                   SplitMix64& rng, std::optional<Point> center = std::nullopt);

struct GateResult {
    Image image;
    bool synthesized = false;
    BinaryMask anomaly_mask;
};

/// Draws z ~ Bernoulli(1 - sigma) and synthesizes only when z = 1.
GateResult gate_synthesis(const Image& image, double sigma, const SynthesisParams& params,
                          const ForegroundMask& foreground, SplitMix64& rng);

}  // namespace foundad
