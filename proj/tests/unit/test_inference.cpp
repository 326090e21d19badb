#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "foundad/error.hpp"
#include "foundad/inference.hpp"
#include "foundad/training.hpp"
#include "procedural.hpp"

using namespace foundad;

namespace {

PatchGrid random_grid(int rows, int cols, int dim, std::uint64_t seed) {
    PatchGrid grid(rows, cols, dim);
    SplitMix64 rng(seed);
    for (auto& v : grid.values) v = static_cast<float>(rng.uniform(-1, 1));
    return grid;
}

ScoreMap make_map(int rows, int cols, std::vector<float> values) { return ScoreMap{rows, cols, std::move(values)}; }

}  // namespace

TEST_CASE("patch scores: identical grids give zero, a unit displacement gives 1/dim") {
    const PatchGrid a = random_grid(3, 2, 8, 1);
    const ScoreMap zero = patch_scores(a, a);
    CHECK(zero.rows == 3);
    CHECK(zero.cols == 2);
    for (float v : zero.values) CHECK(v == 0.0f);
    PatchGrid b = a;
    b.at(2, 1, 5) += 1.0f;
    const ScoreMap one = patch_scores(a, b);
    for (int i = 0; i < 6; ++i) CHECK(one.values[i] == doctest::Approx(i == 5 ? 1.0 / 8 : 0.0));
}

TEST_CASE("patch scores match the scalar-loop oracle") {
    const PatchGrid a = random_grid(2, 3, 5, 2);
    const PatchGrid b = random_grid(2, 3, 5, 3);
    const ScoreMap map = patch_scores(a, b);
    for (int i = 0; i < 6; ++i) {
        double acc = 0;
        for (int c = 0; c < 5; ++c) {
            const double diff = static_cast<double>(b.values[i * 5 + c]) - a.values[i * 5 + c];
            acc += diff * diff;
        }
        CHECK(std::abs(map.values[i] - acc / 5) < 1e-6);
    }
    CHECK_THROWS_AS(patch_scores(a, random_grid(2, 3, 4, 3)), Error);
}

TEST_CASE("Top-K image score definitional cases") {
    const ScoreMap map = make_map(2, 2, {5, 1, 3, 2});
    CHECK(image_score(map, 1).value == 5.0);
    CHECK(image_score(map, 4).value == doctest::Approx(11.0 / 4));
    CHECK(image_score(map, 2).value == 4.0);
    CHECK(image_score(map, 2).k_used == 2);
    const ImageScore clipped = image_score(map, 10);
    CHECK(clipped.k_used == 4);
    CHECK(clipped.value == doctest::Approx(11.0 / 4));
    CHECK_THROWS_AS(image_score(map, 0), Error);
}

TEST_CASE("upsampling constant and 1x1 maps gives constant heatmaps") {
    const Image flat = upsample_heatmap(make_map(2, 3, std::vector<float>(6, 0.7f)), 8, 12);
    for (float v : flat.values) CHECK(v == doctest::Approx(0.7f));
    const Image single = upsample_heatmap(make_map(1, 1, {2.5f}), 5, 5);
    CHECK(single.height == 5);
    for (float v : single.values) CHECK(v == 2.5f);
    const Image zero = upsample_heatmap(make_map(2, 2, {0, 0, 0, 0}), 7, 7);
    for (float v : zero.values) CHECK(v == 0.0f);
    CHECK_THROWS_AS(upsample_heatmap(make_map(4, 4, std::vector<float>(16)), 2, 2), Error);
}

TEST_CASE("2x2 map {0,1;1,0} upsampled to 4x4 matches hand-computed weights") {
    const Image up = upsample_heatmap(make_map(2, 2, {0, 1, 1, 0}), 4, 4);
    // Source coordinates 0, 0.25, 0.75, 1 on both axes; f(sy, sx) = sx + sy - 2 sx sy.
    const float expected[16] = {0.0f,  0.25f,  0.75f,  1.0f,  0.25f, 0.375f, 0.625f, 0.75f,
                                0.75f, 0.625f, 0.375f, 0.25f, 1.0f,  0.75f,  0.25f,  0.0f};
    for (int i = 0; i < 16; ++i) CHECK(up.values[i] == doctest::Approx(expected[i]));
}

TEST_CASE("upsampling stays within the map's bounds") {
    ScoreMap map{3, 4, {}};
    SplitMix64 rng(4);
    for (int i = 0; i < 12; ++i) map.values.push_back(static_cast<float>(rng.uniform(0, 5)));
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    const Image up = upsample_heatmap(map, 48, 64);
    for (float v : up.values) {
        CHECK(v >= *lo - 1e-6f);
        CHECK(v <= *hi + 1e-6f);
    }
}

TEST_CASE("Gaussian smoothing is off at sigma 0 and preserves constants") {
    Image spike(9, 9, 1);
    spike.at(4, 4) = 1.0f;
    CHECK(gaussian_smooth(spike, 0.0).values == spike.values);
    const Image blurred = gaussian_smooth(spike, 1.0);
    double total = 0;
    for (float v : blurred.values) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(blurred.at(4, 4) < 1.0f);
    CHECK(blurred.at(4, 5) == doctest::Approx(blurred.at(5, 4)));
    const Image flat = gaussian_smooth(Image(6, 6, 1, 0.3f), 2.0);
    for (float v : flat.values) CHECK(v == doctest::Approx(0.3f));
}

TEST_CASE("PNG export scaling is per-image min-max") {
    Image h(1, 3, 1);
    h.values = {2.0f, 3.0f, 4.0f};
    CHECK(heatmap_to_u16(h) == std::vector<std::uint16_t>{0, 32768, 65535});
    CHECK(heatmap_to_u16(Image(1, 2, 1, 5.0f)) == std::vector<std::uint16_t>{0, 0});
}

TEST_CASE("untrained projector scores toy images near zero, deterministically") {
    ProjectorConfig cfg;
    cfg.depth = 6;
    cfg.dim = 64;
    const ProjectorParams params = init_projector(cfg, 16);
    const EmbeddingProvider provider(ToyEncoderSpec{64, 16, 7});
    for (auto texture : testing::all_textures()) {
        SplitMix64 rng(static_cast<std::uint64_t>(texture));
        const Image image = testing::render_texture(texture, 64, rng);
        const ScoreResult a = score_image(params, provider, image, 10);
        const ScoreResult b = score_image(params, provider, image, 10);
        CHECK(a.score.value < 1e-3);
        CHECK(a.score.value == b.score.value);
        CHECK(a.heatmap.values == b.heatmap.values);
        CHECK(a.heatmap.height == 64);
        CHECK(a.heatmap.width == 64);
        CHECK(a.score.k_used == 10);
    }
}

TEST_CASE("trained projector puts the heatmap peak inside a solid defect") {
    const int size = 64;
    const EmbeddingProvider provider(ToyEncoderSpec{32, 8, 7});
    std::vector<TrainingImage> pool;
    SplitMix64 rng(21);
    pool.push_back({"checker", testing::render_texture(testing::Texture::Checker, size, rng)});
    ProjectorConfig pc;
    pc.depth = 1;
    pc.dim = 32;
    TrainConfig tc;
    tc.iterations = 300;
    tc.image_size = size;
    tc.loss = LossNormalization::PatchSum;
    const TrainResult trained = train(pool, provider, pc, tc);

    Image image = testing::render_texture(testing::Texture::Checker, size, rng);
    BinaryMask mask(size, size);
    for (int y = 20; y < 40; ++y)
        for (int x = 30; x < 50; ++x) {
            for (int c = 0; c < 3; ++c) image.at(y, x, c) = 0.95f;
            mask.at(y, x) = 1;
        }
    const ScoreResult result = score_image(trained.params, provider, image, 4);
    const auto peak = std::max_element(result.heatmap.values.begin(), result.heatmap.values.end());
    const auto index = static_cast<std::size_t>(peak - result.heatmap.values.begin());
    CHECK(mask.values[index] == 1);
}
