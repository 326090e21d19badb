#include <doctest.h>

#include <vector>

#include "foundad/analysis.hpp"
#include "foundad/error.hpp"
#include "procedural.hpp"

using namespace foundad;

namespace {

std::vector<double> nested_ratios() {
    std::vector<double> ratios{0.0};
    for (int i = 0; i < 20; ++i) ratios.push_back(0.005 + i * (0.145 / 19));
    return ratios;
}

Image grain_fixture(int size) {
    SplitMix64 rng(10);
    return testing::render_texture(testing::Texture::Grain, size, rng);
}

}  // namespace

TEST_CASE("distance grows with pasted area on a textured fixture") {
    const EmbeddingProvider provider(ToyEncoderSpec{64, 16, 7});
    const Image image = grain_fixture(128);
    const auto ratios = nested_ratios();
    const DistanceSeries series = distance_vs_area(image, provider, ratios, 0);
    REQUIRE(series.size() == 21);
    CHECK(series[0].pixel_count == 0);
    CHECK(series[0].distance == 0.0);
    for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i].pixel_count > series[i - 1].pixel_count);
    CHECK(spearman(series) >= 0.8);

    const DistanceSeries again = distance_vs_area(image, provider, ratios, 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(again[i].pixel_count == series[i].pixel_count);
        CHECK(again[i].distance == series[i].distance);
    }
}

TEST_CASE("distance_vs_area rejects bad ratio lists") {
    const EmbeddingProvider provider(ToyEncoderSpec{8, 16, 7});
    const Image image = grain_fixture(64);
    CHECK_THROWS_AS(distance_vs_area(image, provider, std::vector<double>{}, 0), Error);
    CHECK_THROWS_AS(distance_vs_area(image, provider, std::vector<double>{0.1, 0.05}, 0), Error);
    CHECK_THROWS_AS(distance_vs_area(image, provider, std::vector<double>{0.0, 1.0}, 0), Error);
    CHECK_THROWS_WITH_AS(distance_vs_area(image, provider, std::vector<double>{0.01, 0.0100001}, 0),
                         doctest::Contains("pixel count did not increase"), Error);
}

TEST_CASE("deepest foreground point sits at the square's center") {
    BinaryMask mask(21, 21);
    for (int y = 5; y < 16; ++y)
        for (int x = 5; x < 16; ++x) mask.at(y, x) = 1;
    const Point p = deepest_foreground_point(mask);
    CHECK(p.x == 10);
    CHECK(p.y == 10);
}

TEST_CASE("spearman trivial cases") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(spearman(x, std::vector<double>{0.1, 0.5, 0.7, 2.0, 9.0}) == doctest::Approx(1.0));
    CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
    CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 1, 1, 1, 1}), Error);
    CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("spearman with ties matches hand-ranked Pearson") {
    const std::vector<double> x{1, 2, 2, 3, 5, 4};
    const std::vector<double> y{3, 1, 4, 4, 6, 5};
    // Average ranks: x -> 1, 2.5, 2.5, 4, 6, 5; y -> 2, 1, 3.5, 3.5, 6, 5.
    const std::vector<double> rx{1, 2.5, 2.5, 4, 6, 5};
    const std::vector<double> ry{2, 1, 3.5, 3.5, 6, 5};
    double mx = 0, my = 0;
    for (int i = 0; i < 6; ++i) {
        mx += rx[i] / 6;
        my += ry[i] / 6;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 6; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    CHECK(std::abs(spearman(x, y) - sxy / std::sqrt(sxx * syy)) < 1e-9);
}

TEST_CASE("distance series CSV and scatter plot") {
    const DistanceSeries series{{0, 0.0}, {100, 0.5}, {400, 1.25}};
    const std::string csv = distance_series_csv(series);
    CHECK(csv.find("pixel_count,distance\n0,0\n100,0.5\n400,1.25\n") != std::string::npos);
    const auto rgb = render_scatter(series, 100, 120);
    CHECK(rgb.size() == 100u * 120u * 3u);
    int red = 0;
    for (std::size_t i = 0; i < rgb.size(); i += 3)
        if (rgb[i] == 200 && rgb[i + 1] == 30) ++red;
    CHECK(red > 0);
}
