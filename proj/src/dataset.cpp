#include "foundad/dataset.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "foundad/error.hpp"
#include "foundad/image_io.hpp"
#include "foundad/rng.hpp"

namespace fs = std::filesystem;

namespace foundad {

Layout parse_layout(std::string_view name) {
    if (name == "mvtec") return Layout::MVTec;
    if (name == "visa") return Layout::VisA;
    fail(ErrorKind::InvalidArgument, "unknown dataset layout '" + std::string(name) + "' (expected mvtec or visa)");
}

std::string_view layout_name(Layout layout) { return layout == Layout::MVTec ? "mvtec" : "visa"; }

int default_top_k(Layout layout) noexcept { return layout == Layout::MVTec ? 10 : 6; }

const CategoryEntry& DatasetIndex::category(std::string_view name) const {
    for (const auto& entry : categories) {
        if (entry.name == name) return entry;
    }
    fail(ErrorKind::InvalidArgument, "unknown category: " + std::string(name));
}

namespace {

std::string relative_id(const fs::path& root, const fs::path& file) {
    return fs::relative(file, root).generic_string();
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_extension(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<fs::path> list_subdirs(const fs::path& dir) {
    std::vector<fs::path> dirs;
    if (!fs::is_directory(dir)) return dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

void check_readable(const fs::path& file) {
    if (!has_image_signature(file)) fail(ErrorKind::Io, "unreadable image: " + file.string());
}

fs::path expected_mask(const fs::path& category_dir, const std::string& defect, const fs::path& image, Layout layout) {
    const std::string stem = image.stem().string();
    const fs::path dir = category_dir / "ground_truth" / defect;
    if (layout == Layout::MVTec) return dir / (stem + "_mask.png");
    return dir / (stem + ".png");
}

CategoryEntry scan_category(const fs::path& root, const fs::path& category_dir, Layout layout) {
    CategoryEntry entry;
    entry.name = category_dir.filename().string();

    for (const auto& file : list_images(category_dir / "train" / "good")) {
        check_readable(file);
        entry.train_normal.push_back(relative_id(root, file));
    }
    if (entry.train_normal.empty()) {
        fail(ErrorKind::InvalidArgument, "category has no normal training images: " + entry.name);
    }

    for (const auto& defect_dir : list_subdirs(category_dir / "test")) {
        const std::string defect = defect_dir.filename().string();
        for (const auto& file : list_images(defect_dir)) {
            check_readable(file);
            if (defect == "good") {
                entry.test_normal.push_back(relative_id(root, file));
                continue;
            }
            const fs::path mask = expected_mask(category_dir, defect, file, layout);
            if (!fs::is_regular_file(mask)) {
                fail(ErrorKind::Io, "missing ground-truth mask for " + relative_id(root, file) + ": expected " + mask.string());
            }
            entry.test_anomalous.push_back({relative_id(root, file), relative_id(root, mask)});
        }
    }
    std::sort(entry.test_normal.begin(), entry.test_normal.end());
    std::sort(entry.test_anomalous.begin(), entry.test_anomalous.end(),
              [](const AnomalousEntry& a, const AnomalousEntry& b) { return a.image < b.image; });
    return entry;
}

}  // namespace

DatasetIndex scan_dataset(const fs::path& root, Layout layout) {
    if (!fs::is_directory(root)) fail(ErrorKind::InvalidArgument, "dataset root does not exist: " + root.string());
    DatasetIndex index;
    index.root = root;
    index.layout = layout;
    for (const auto& dir : list_subdirs(root)) {
        // Categories are directories holding a train/ split; anything else (license files, split csvs) is ignored.
        if (!fs::is_directory(dir / "train")) continue;
        index.categories.push_back(scan_category(root, dir, layout));
    }
    if (index.categories.empty()) fail(ErrorKind::InvalidArgument, "no category directories under " + root.string());
    return index;
}

std::vector<std::string> sample_category(std::vector<std::string> ids, std::string_view category, int k,
                                         std::uint64_t seed) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
    std::sort(ids.begin(), ids.end());
    SplitMix64 rng(seed ^ fnv1a64(category));
    const std::size_t n = ids.size();
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(take);
    std::sort(ids.begin(), ids.end());
    return ids;
}

FewShotManifest sample_few_shot(const DatasetIndex& index, int k, std::uint64_t seed) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
    FewShotManifest manifest;
    manifest.seed = seed;
    manifest.k = k;
    for (const auto& category : index.categories) {
        manifest.selections[category.name] = sample_category(category.train_normal, category.name, k, seed);
    }
    return manifest;
}

std::string FewShotManifest::to_json() const {
    nlohmann::ordered_json doc;
    doc["schema"] = kManifestSchema;
    doc["seed"] = seed;
    doc["k"] = k;
    nlohmann::ordered_json sel = nlohmann::ordered_json::object();
    for (const auto& [name, ids] : selections) sel[name] = ids;
    doc["selections"] = std::move(sel);
    return doc.dump(2) + "\n";
}

FewShotManifest FewShotManifest::from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", std::string{}) != kManifestSchema) {
        fail(ErrorKind::Format, "manifest schema must be " + std::string(kManifestSchema));
    }
    FewShotManifest manifest;
    try {
        manifest.seed = doc.at("seed").get<std::uint64_t>();
        manifest.k = doc.at("k").get<int>();
        for (const auto& [name, ids] : doc.at("selections").items()) {
            manifest.selections[name] = ids.get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed manifest: ") + e.what());
    }
    if (manifest.k < 1) fail(ErrorKind::Format, "manifest k must be positive");
    return manifest;
}

Image from_raw(const RawImage& raw) {
    Image image(raw.height, raw.width, 3);
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) {
            const int src_c = raw.channels == 1 ? 0 : c;
            image.values[p * 3 + c] = static_cast<float>(raw.bytes[p * raw.channels + src_c]) / 255.0f;
        }
    }
    return image;
}

Image load_rgb(const fs::path& path, int target_size) {
    if (target_size <= 0) fail(ErrorKind::InvalidArgument, "target size must be positive");
    return resize_bilinear(from_raw(decode_image(path)), target_size, target_size);
}

BinaryMask load_mask(const fs::path& path, int target_size) {
    if (target_size <= 0) fail(ErrorKind::InvalidArgument, "target size must be positive");
    const RawImage raw = decode_image(path);
    BinaryMask mask(raw.height, raw.width);
    for (std::size_t p = 0; p < mask.pixel_count(); ++p) {
        int sum = 0;
        for (int c = 0; c < raw.channels; ++c) sum += raw.bytes[p * raw.channels + c];
        mask.values[p] = (sum / raw.channels) > 127 ? 1 : 0;
    }
    return resize_nearest(mask, target_size, target_size);
}

LabeledImage load_image(const fs::path& path, int target_size, const std::optional<fs::path>& mask_path) {
    LabeledImage image;
    image.pixels = load_rgb(path, target_size);
    if (mask_path) {
        image.anomaly_mask = load_mask(*mask_path, target_size);
        image.label = ImageLabel::Anomalous;
    }
    return image;
}

}  // namespace foundad
