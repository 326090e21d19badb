#include <doctest.h>

#include <fstream>

#include "foundad/dataset.hpp"
#include "foundad/error.hpp"
#include "procedural.hpp"
#include "temp_dir.hpp"

using namespace foundad;
using foundad::testing::TempDir;
using foundad::testing::write_mask_png;
using foundad::testing::write_rgb_png;

namespace {

void write_bottle(const std::filesystem::path& root) {
    const Image gray(8, 8, 3, 0.5f);
    BinaryMask mask(8, 8);
    mask.at(2, 3) = 1;
    for (int i = 0; i < 5; ++i) write_rgb_png(root / "bottle/train/good" / ("00" + std::to_string(i) + ".png"), gray);
    for (int i = 0; i < 2; ++i) {
        write_rgb_png(root / "bottle/test/good" / ("00" + std::to_string(i) + ".png"), gray);
        write_rgb_png(root / "bottle/test/crack" / ("00" + std::to_string(i) + ".png"), gray);
        write_mask_png(root / "bottle/ground_truth/crack" / ("00" + std::to_string(i) + "_mask.png"), mask);
    }
}

}  // namespace

TEST_CASE("scan_dataset counts and sorts an MVTec-style tree") {
    TempDir dir("dataset");
    write_bottle(dir.path());
    const DatasetIndex index = scan_dataset(dir.path(), Layout::MVTec);
    REQUIRE(index.categories.size() == 1);
    const CategoryEntry& bottle = index.category("bottle");
    CHECK(bottle.train_normal.size() == 5);
    CHECK(bottle.test_normal.size() == 2);
    REQUIRE(bottle.test_anomalous.size() == 2);
    CHECK(std::is_sorted(bottle.train_normal.begin(), bottle.train_normal.end()));
    CHECK(bottle.train_normal.front() == "bottle/train/good/000.png");
    for (const auto& entry : bottle.test_anomalous) {
        const std::string stem = std::filesystem::path(entry.image).stem().string();
        CHECK(entry.mask == "bottle/ground_truth/crack/" + stem + "_mask.png");
    }
    CHECK_THROWS_AS(index.category("cable"), Error);
}

TEST_CASE("a category without training images is rejected by name") {
    TempDir dir("dataset");
    std::filesystem::create_directories(dir / "empty/train/good");
    try {
        scan_dataset(dir.path(), Layout::MVTec);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("category has no normal training images") != std::string::npos);
        CHECK(std::string(e.what()).find("empty") != std::string::npos);
    }
}

TEST_CASE("a missing mask names the expected path") {
    TempDir dir("dataset");
    write_bottle(dir.path());
    std::filesystem::remove(dir / "bottle/ground_truth/crack/001_mask.png");
    try {
        scan_dataset(dir.path(), Layout::MVTec);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
        CHECK(std::string(e.what()).find("001_mask.png") != std::string::npos);
    }
}

TEST_CASE("unreadable image files are reported") {
    TempDir dir("dataset");
    write_bottle(dir.path());
    std::ofstream(dir / "bottle/train/good/009.png") << "garbage";
    CHECK_THROWS_AS(scan_dataset(dir.path(), Layout::MVTec), Error);
}

TEST_CASE("VisA-style trees pair bad images with same-stem masks") {
    TempDir dir("dataset");
    const Image gray(8, 8, 3, 0.5f);
    write_rgb_png(dir / "pcb1/train/good/a.png", gray);
    write_rgb_png(dir / "pcb1/test/good/b.png", gray);
    write_rgb_png(dir / "pcb1/test/bad/c.png", gray);
    write_mask_png(dir / "pcb1/ground_truth/bad/c.png", BinaryMask(8, 8, 1));
    const DatasetIndex index = scan_dataset(dir.path(), Layout::VisA);
    const CategoryEntry& pcb = index.category("pcb1");
    REQUIRE(pcb.test_anomalous.size() == 1);
    CHECK(pcb.test_anomalous[0].image == "pcb1/test/bad/c.png");
    CHECK(pcb.test_anomalous[0].mask == "pcb1/ground_truth/bad/c.png");
}

TEST_CASE("layout names and default Top-K") {
    CHECK(parse_layout("mvtec") == Layout::MVTec);
    CHECK(parse_layout("visa") == Layout::VisA);
    CHECK_THROWS_AS(parse_layout("kolektor"), Error);
    CHECK(default_top_k(Layout::MVTec) == 10);
    CHECK(default_top_k(Layout::VisA) == 6);
}

TEST_CASE("few-shot draw matches the reference script for k=2, seed=42") {
    std::vector<std::string> ids;
    for (int i = 0; i < 5; ++i) ids.push_back("bottle/train/good/00" + std::to_string(i) + ".png");
    // tests/scripts/manifest_oracle.py bottle 2 42 <ids>
    const auto picked = sample_category(ids, "bottle", 2, 42);
    CHECK(picked == std::vector<std::string>{"bottle/train/good/001.png", "bottle/train/good/004.png"});
    CHECK(sample_category({"a", "b", "c", "d", "e"}, "bottle", 1, 7) == std::vector<std::string>{"d"});
}

TEST_CASE("k at or above the list size returns the full sorted list") {
    const std::vector<std::string> ids{"c", "a", "b"};
    CHECK(sample_category(ids, "x", 3, 1) == std::vector<std::string>{"a", "b", "c"});
    CHECK(sample_category(ids, "x", 9, 1) == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS(sample_category(ids, "x", 0, 1), Error);
}

TEST_CASE("few-shot draws support k in {1, 2, 4} and are seed-stable") {
    TempDir dir("dataset");
    write_bottle(dir.path());
    const DatasetIndex index = scan_dataset(dir.path(), Layout::MVTec);
    for (int k : {1, 2, 4}) {
        const FewShotManifest a = sample_few_shot(index, k, 3);
        const FewShotManifest b = sample_few_shot(index, k, 3);
        CHECK(a.selections.at("bottle").size() == static_cast<std::size_t>(k));
        CHECK(a.to_json() == b.to_json());
    }
}

TEST_CASE("adding a category leaves the others' draws unchanged") {
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back("cat/" + std::to_string(100 + i));
    DatasetIndex one;
    one.categories.push_back({"cat", ids, {}, {}});
    DatasetIndex two = one;
    two.categories.insert(two.categories.begin(), CategoryEntry{"aaa", ids, {}, {}});
    CHECK(sample_few_shot(one, 2, 5).selections.at("cat") == sample_few_shot(two, 2, 5).selections.at("cat"));
}

TEST_CASE("manifest JSON round trip") {
    FewShotManifest m;
    m.seed = 18446744073709551615ULL;
    m.k = 2;
    m.selections["b"] = {"b/1", "b/2"};
    m.selections["a"] = {"a/9"};
    const std::string text = m.to_json();
    CHECK(text.find("\"schema\": \"foundad-manifest/1\"") != std::string::npos);
    const FewShotManifest back = FewShotManifest::from_json(text);
    CHECK(back.seed == m.seed);
    CHECK(back.k == 2);
    CHECK(back.selections == m.selections);
    CHECK(back.to_json() == text);
    CHECK_THROWS_AS(FewShotManifest::from_json("{\"schema\": \"other\"}"), Error);
    CHECK_THROWS_AS(FewShotManifest::from_json("not json"), Error);
}

TEST_CASE("load_image resizes pixels and masks to the target size") {
    TempDir dir("dataset");
    Image img(4, 4, 3, 0.0f);
    img.at(0, 0, 0) = 1.0f;
    write_rgb_png(dir / "img.png", img);
    BinaryMask mask(4, 4);
    mask.at(3, 3) = 1;
    write_mask_png(dir / "mask.png", mask);

    const LabeledImage same = load_image(dir / "img.png", 4, dir / "mask.png");
    CHECK(same.label == ImageLabel::Anomalous);
    for (std::size_t i = 0; i < img.values.size(); ++i) CHECK(std::abs(same.pixels.values[i] - img.values[i]) <= 1.0f / 255);

    const LabeledImage big = load_image(dir / "img.png", 8, dir / "mask.png");
    CHECK(big.pixels.height == 8);
    REQUIRE(big.anomaly_mask.has_value());
    CHECK(big.anomaly_mask->count() == 4);
    CHECK(big.anomaly_mask->at(7, 7) == 1);
    CHECK(load_image(dir / "img.png", 8).label == ImageLabel::Normal);
}

TEST_CASE("grayscale files are replicated across channels") {
    RawImage raw{1, 2, 1, {0, 255}};
    const Image image = from_raw(raw);
    CHECK(image.channels == 3);
    CHECK(image.at(0, 1, 2) == doctest::Approx(1.0f));
    CHECK(image.at(0, 0, 1) == doctest::Approx(0.0f));
}
