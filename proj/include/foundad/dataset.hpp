#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foundad/image.hpp"
#include "foundad/image_io.hpp"

namespace foundad {

enum class Layout { MVTec, VisA };

Layout parse_layout(std::string_view name);
std::string_view layout_name(Layout layout);

/// Default Top-K for image scoring on each benchmark layout.
int default_top_k(Layout layout) noexcept;

/// Image ids are paths relative to the dataset root with forward slashes,
/// e.g. "bottle/test/broken_large/000.png".
struct AnomalousEntry {
    std::string image;
    std::string mask;
};

struct CategoryEntry {
    std::string name;
    std::vector<std::string> train_normal;
    std::vector<std::string> test_normal;
    std::vector<AnomalousEntry> test_anomalous;
};

struct DatasetIndex {
    std::filesystem::path root;
    Layout layout = Layout::MVTec;
    std::vector<CategoryEntry> categories;

    const CategoryEntry& category(std::string_view name) const;
    std::filesystem::path resolve(std::string_view id) const { return root / std::filesystem::path(std::string(id)); }
};

/// Walks an MVTec-style or VisA-style tree:
///   MVTec: <cat>/train/good, <cat>/test/<defect>, <cat>/ground_truth/<defect>/<stem>_mask.png
///   VisA:  <cat>/train/good, <cat>/test/good, <cat>/test/bad, <cat>/ground_truth/bad/<stem>.png
/// Every list comes back sorted by relative path.
DatasetIndex scan_dataset(const std::filesystem::path& root, Layout layout);

struct FewShotManifest {
    std::uint64_t seed = 0;
    int k = 1;
    std::map<std::string, std::vector<std::string>> selections;

    std::string to_json() const;
    static FewShotManifest from_json(std::string_view text);
};

inline constexpr std::string_view kManifestSchema = "foundad-manifest/1";

/// Per category: partial Fisher-Yates over the sorted training list driven by
/// SplitMix64(seed ^ fnv1a64(category)), keep the first min(k, n), re-sort.
FewShotManifest sample_few_shot(const DatasetIndex& index, int k, std::uint64_t seed);

/// Same draw on a bare list; exposed for callers that hold ids without an index.
std::vector<std::string> sample_category(std::vector<std::string> sorted_ids, std::string_view category, int k,
                                         std::uint64_t seed);

enum class ImageLabel { Normal, Anomalous };

struct LabeledImage {
    Image pixels;  // HxWx3 in [0, 1]
    std::optional<BinaryMask> anomaly_mask;
    ImageLabel label = ImageLabel::Normal;
};

/// Decodes and resizes to target_size x target_size (bilinear, half-pixel centers).
Image load_rgb(const std::filesystem::path& path, int target_size);

/// Loads a mask, thresholds at > 127 and resizes with nearest neighbor.
BinaryMask load_mask(const std::filesystem::path& path, int target_size);

LabeledImage load_image(const std::filesystem::path& path, int target_size,
                        const std::optional<std::filesystem::path>& mask_path = std::nullopt);

/// Converts decoded bytes to [0, 1] RGB; grayscale is replicated across channels.
Image from_raw(const RawImage& raw);

}  // namespace foundad
