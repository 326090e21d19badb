#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "foundad/embedding.hpp"
#include "foundad/error.hpp"
#include "foundad/rng.hpp"
#include "temp_dir.hpp"

using namespace foundad;
using foundad::testing::TempDir;

namespace {

Image random_image(int size, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Image image(size, size, 3);
    for (auto& v : image.values) v = static_cast<float>(rng.uniform01());
    return image;
}

// Scalar-loop toy encoder for the first output vector (patch 0, 0).
std::vector<double> toy_first_vector_oracle(const Image& image, int dim, int patch, std::uint64_t seed) {
    const int fan_in = 3 * patch * patch;
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    SplitMix64 rng(seed);
    std::vector<double> w(static_cast<std::size_t>(dim) * fan_in);
    for (auto& v : w) v = static_cast<float>(a * (2.0 * rng.uniform01() - 1.0));
    std::vector<double> out(dim);
    for (int d = 0; d < dim; ++d) {
        double acc = 0;
        int j = 0;
        for (int py = 0; py < patch; ++py)
            for (int px = 0; px < patch; ++px)
                for (int c = 0; c < 3; ++c) acc += w[static_cast<std::size_t>(d) * fan_in + j++] * image.at(py, px, c);
        out[d] = std::tanh(acc);
    }
    return out;
}

void put_u32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

TEST_CASE("SplitMix64 matches the reference sequence") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 unit(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = unit.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(unit.below(7) < 7u);
    }
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("toy provider maps 512x512 at patch 16 to a 32x32 grid") {
    const EmbeddingProvider provider(ToyEncoderSpec{64, 16, 7});
    const PatchGrid grid = provider.encode(Image(512, 512, 3, 0.25f));
    CHECK(grid.rows == 32);
    CHECK(grid.cols == 32);
    CHECK(grid.dim == 64);
    CHECK(provider.dim() == 64);
}

TEST_CASE("toy encoding is deterministic and zero input gives zero output") {
    const Image image = random_image(32, 4);
    const PatchGrid a = toy_encode(image, 16, 8, 7);
    const PatchGrid b = toy_encode(image, 16, 8, 7);
    CHECK(a.values == b.values);
    const PatchGrid zero = toy_encode(Image(32, 32, 3, 0.0f), 16, 8, 7);
    for (float v : zero.values) CHECK(v == 0.0f);
    CHECK(toy_encode(image, 16, 8, 8).values != a.values);
}

TEST_CASE("changing one patch changes only that grid cell") {
    Image image = random_image(32, 5);
    const PatchGrid before = toy_encode(image, 8, 8, 7);
    for (int y = 8; y < 16; ++y)
        for (int x = 16; x < 24; ++x) image.at(y, x, 1) += 0.3f;
    const PatchGrid after = toy_encode(image, 8, 8, 7);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            bool same = true;
            for (int d = 0; d < 8; ++d) same = same && before.at(r, c, d) == after.at(r, c, d);
            CHECK(same == !(r == 1 && c == 2));
        }
}

TEST_CASE("first toy output vector matches the scalar-loop oracle") {
    const Image image = random_image(8, 12);
    const PatchGrid grid = toy_encode(image, 8, 4, 7);
    const auto oracle = toy_first_vector_oracle(image, 8, 4, 7);
    for (int d = 0; d < 8; ++d) CHECK(grid.at(0, 0, d) == doctest::Approx(oracle[d]).epsilon(1e-5));
    const auto weights = toy_encoder_weights(8, 4, 7);
    CHECK(weights.size() == 8u * 48u);
    for (float w : weights) CHECK(std::abs(w) <= 1.0f / std::sqrt(48.0f));
}

TEST_CASE("toy encoder rejects sizes that do not tile") {
    CHECK_THROWS_AS(toy_encode(Image(30, 32, 3), 8, 8, 7), Error);
    CHECK_THROWS_AS(toy_encode(Image(32, 32, 1), 8, 8, 7), Error);
}

TEST_CASE("provider specs parse and describe themselves") {
    const ProviderSpec toy = parse_provider_spec("toy:dim=32,patch=8,seed=3");
    REQUIRE(std::holds_alternative<ToyEncoderSpec>(toy));
    CHECK(std::get<ToyEncoderSpec>(toy).dim == 32);
    CHECK(std::get<ToyEncoderSpec>(toy).patch_size == 8);
    CHECK(std::get<ToyEncoderSpec>(toy).weight_seed == 3u);
    CHECK(describe_provider(toy) == "toy:dim=32,patch=8,seed=3");
    const ProviderSpec file = parse_provider_spec("file:dir=/tmp/feats");
    REQUIRE(std::holds_alternative<FileProviderSpec>(file));
    CHECK(std::get<FileProviderSpec>(file).directory == "/tmp/feats");
    CHECK_THROWS_AS(parse_provider_spec("dino:dim=3"), Error);
    CHECK_THROWS_AS(parse_provider_spec("toy:dim=x"), Error);
    CHECK_THROWS_AS(parse_provider_spec("toy:width=3"), Error);
    CHECK_THROWS_AS(parse_provider_spec("file:"), Error);
}

TEST_CASE("toy weights are frozen: the fingerprint never moves") {
    const EmbeddingProvider provider(ToyEncoderSpec{16, 8, 7});
    const auto before = provider.weight_fingerprint();
    (void)provider.encode(random_image(32, 1));
    CHECK(provider.weight_fingerprint() == before);
    CHECK(EmbeddingProvider(ToyEncoderSpec{16, 8, 8}).weight_fingerprint() != before);
}

TEST_CASE("tensor round trip is bit-identical") {
    TempDir dir("embedding");
    PatchGrid grid(3, 2, 5);
    SplitMix64 rng(8);
    for (auto& v : grid.values) v = static_cast<float>(rng.uniform(-3, 3));
    grid.values[0] = -0.0f;
    write_tensor(dir / "a/b/c.ftns", grid);
    const PatchGrid back = read_tensor(dir / "a/b/c.ftns");
    CHECK(back.same_shape(grid));
    CHECK(std::memcmp(back.values.data(), grid.values.data(), grid.values.size() * sizeof(float)) == 0);
}

TEST_CASE("a hand-written (32, 32, 768) tensor reads back as a 32x32x768 grid") {
    TempDir dir("embedding");
    {
        std::ofstream out(dir / "feat.ftns", std::ios::binary);
        out.write("FTNS", 4);
        put_u32(out, 1);
        put_u32(out, 3);
        for (std::uint32_t d : {32u, 32u, 768u}) put_u32(out, d);
        for (std::uint32_t i = 0; i < 32u * 32u * 768u; ++i) {
            const float v = static_cast<float>(i % 97) * 0.5f;
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    const PatchGrid grid = read_tensor(dir / "feat.ftns");
    CHECK(grid.rows == 32);
    CHECK(grid.cols == 32);
    CHECK(grid.dim == 768);
    CHECK(grid.at(0, 1, 5) == doctest::Approx((773 % 97) * 0.5));
}

TEST_CASE("file provider reads stored embeddings and refuses novel pixels") {
    TempDir dir("embedding");
    PatchGrid grid(2, 2, 4, 0.5f);
    write_tensor(dir / "feats/bottle/test/good/000.ftns", grid);
    const EmbeddingProvider provider(FileProviderSpec{dir / "feats"});
    CHECK_FALSE(provider.encodes_pixels());
    CHECK(provider.embedding_path("bottle/test/good/000.png") == dir / "feats/bottle/test/good/000.ftns");
    CHECK(provider.encode("bottle/test/good/000.png", Image()).values == grid.values);
    CHECK_THROWS_WITH_AS(provider.encode(Image(32, 32, 3)), "file provider cannot encode novel pixels", Error);
    try {
        (void)provider.encode("bottle/test/good/001.png", Image());
        FAIL("expected missing file");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("missing embedding file") != std::string::npos);
        CHECK(std::string(e.what()).find("001.ftns") != std::string::npos);
    }
}

TEST_CASE("read_tensor rejects wrong magic and wrong rank") {
    TempDir dir("embedding");
    std::ofstream(dir / "bad.ftns", std::ios::binary) << "NOPE1234";
    CHECK_THROWS_WITH_AS(read_tensor(dir / "bad.ftns"), doctest::Contains("not an FTNS tensor"), Error);
    {
        std::ofstream out(dir / "rank2.ftns", std::ios::binary);
        out.write("FTNS", 4);
        put_u32(out, 1);
        put_u32(out, 2);
        put_u32(out, 1);
        put_u32(out, 1);
        const float v = 1.0f;
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    CHECK_THROWS_AS(read_tensor(dir / "rank2.ftns"), Error);
}
