#include "foundad/embedding.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>

#include "foundad/error.hpp"
#include "foundad/rng.hpp"
#include "foundad/tensor_io.hpp"

namespace foundad {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void PatchGrid::validate() const {
    if (rows <= 0 || cols <= 0 || dim <= 0) fail(ErrorKind::ShapeMismatch, "patch grid dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(rows) * cols * dim) {
        fail(ErrorKind::ShapeMismatch, "patch grid buffer does not match its dimensions");
    }
    for (float v : values) {
        if (!std::isfinite(v)) fail(ErrorKind::Numeric, "patch grid contains non-finite values");
    }
}

namespace {

long long parse_int(std::string_view key, std::string_view value) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(ErrorKind::InvalidArgument, "provider option " + std::string(key) + " expects an integer, got '" + std::string(value) + "'");
    }
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(ErrorKind::InvalidArgument, "provider option " + std::string(key) + " expects an unsigned integer");
    }
    return out;
}

}  // namespace

ProviderSpec parse_provider_spec(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    ToyEncoderSpec toy;
    FileProviderSpec file;
    bool have_dir = false;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) fail(ErrorKind::InvalidArgument, "provider option must be key=value: " + std::string(item));
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (kind == "toy" && key == "dim") {
            toy.dim = static_cast<int>(parse_int(key, value));
        } else if (kind == "toy" && key == "patch") {
            toy.patch_size = static_cast<int>(parse_int(key, value));
        } else if (kind == "toy" && key == "seed") {
            toy.weight_seed = parse_u64(key, value);
        } else if (kind == "file" && key == "dir") {
            file.directory = std::string(value);
            have_dir = true;
        } else {
            fail(ErrorKind::InvalidArgument, "unknown provider option '" + std::string(key) + "' for kind " + std::string(kind));
        }
    }
    if (kind == "toy") {
        if (toy.dim < 1 || toy.patch_size < 1) fail(ErrorKind::InvalidArgument, "toy provider needs dim >= 1 and patch >= 1");
        return toy;
    }
    if (kind == "file") {
        if (!have_dir) fail(ErrorKind::InvalidArgument, "file provider needs dir=<path>");
        return file;
    }
    fail(ErrorKind::InvalidArgument, "unknown provider kind '" + std::string(kind) + "' (expected toy or file)");
}

std::string describe_provider(const ProviderSpec& spec) {
    if (const auto* toy = std::get_if<ToyEncoderSpec>(&spec)) {
        return "toy:dim=" + std::to_string(toy->dim) + ",patch=" + std::to_string(toy->patch_size) +
               ",seed=" + std::to_string(toy->weight_seed);
    }
    return "file:dir=" + std::get<FileProviderSpec>(spec).directory.generic_string();
}

std::vector<float> toy_encoder_weights(int dim, int patch_size, std::uint64_t weight_seed) {
    if (dim < 1 || patch_size < 1) fail(ErrorKind::InvalidArgument, "toy encoder needs dim >= 1 and patch >= 1");
    const std::size_t fan_in = 3u * static_cast<std::size_t>(patch_size) * patch_size;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    SplitMix64 rng(weight_seed);
    std::vector<float> weights(static_cast<std::size_t>(dim) * fan_in);
    for (float& w : weights) w = static_cast<float>(bound * (2.0 * rng.uniform01() - 1.0));
    return weights;
}

namespace {

PatchGrid encode_with_weights(const Image& image, int dim, int patch_size, const std::vector<float>& weights) {
    if (image.channels != 3) fail(ErrorKind::InvalidArgument, "toy encoder expects a 3-channel image");
    if (image.height % patch_size != 0 || image.width % patch_size != 0) {
        fail(ErrorKind::InvalidArgument, "image side " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                                             " is not divisible by patch size " + std::to_string(patch_size));
    }
    const int rows = image.height / patch_size;
    const int cols = image.width / patch_size;
    const int fan_in = 3 * patch_size * patch_size;

    RowMatrix patches(rows * cols, fan_in);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            float* dst = patches.row(r * cols + c).data();
            for (int py = 0; py < patch_size; ++py) {
                const float* src = &image.values[image.index(r * patch_size + py, c * patch_size)];
                std::copy(src, src + 3 * patch_size, dst + py * 3 * patch_size);
            }
        }
    }
    const Eigen::Map<const RowMatrix> w(weights.data(), dim, fan_in);
    PatchGrid grid(rows, cols, dim);
    Eigen::Map<RowMatrix> out(grid.values.data(), rows * cols, dim);
    out.noalias() = patches * w.transpose();
    out = out.array().tanh();
    return grid;
}

}  // namespace

PatchGrid toy_encode(const Image& image, int dim, int patch_size, std::uint64_t weight_seed) {
    return encode_with_weights(image, dim, patch_size, toy_encoder_weights(dim, patch_size, weight_seed));
}

EmbeddingProvider::EmbeddingProvider(ProviderSpec spec) : spec_(std::move(spec)) {
    if (const auto* toy = std::get_if<ToyEncoderSpec>(&spec_)) {
        weights_ = toy_encoder_weights(toy->dim, toy->patch_size, toy->weight_seed);
    }
}

int EmbeddingProvider::dim() const noexcept {
    const auto* toy = std::get_if<ToyEncoderSpec>(&spec_);
    return toy ? toy->dim : 0;
}

PatchGrid EmbeddingProvider::encode(const Image& pixels) const {
    const auto* toy = std::get_if<ToyEncoderSpec>(&spec_);
    if (!toy) fail(ErrorKind::InvalidArgument, "file provider cannot encode novel pixels");
    return encode_with_weights(pixels, toy->dim, toy->patch_size, weights_);
}

PatchGrid EmbeddingProvider::encode(std::string_view image_id, const Image& pixels) const {
    if (encodes_pixels()) return encode(pixels);
    return read_tensor(embedding_path(image_id));
}

std::filesystem::path EmbeddingProvider::embedding_path(std::string_view image_id) const {
    const auto* file = std::get_if<FileProviderSpec>(&spec_);
    if (!file) fail(ErrorKind::InvalidArgument, "toy provider has no embedding files");
    std::filesystem::path rel{std::string(image_id)};
    rel.replace_extension(".ftns");
    return file->directory / rel;
}

std::uint64_t EmbeddingProvider::weight_fingerprint() const noexcept {
    const auto* bytes = reinterpret_cast<const char*>(weights_.data());
    return fnv1a64(std::string_view(bytes, weights_.size() * sizeof(float)));
}

void write_tensor(const std::filesystem::path& path, const PatchGrid& grid) {
    grid.validate();
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(grid.rows), static_cast<std::uint32_t>(grid.cols),
                                   static_cast<std::uint32_t>(grid.dim)};
    write_ftns_file(path, dims, grid.values);
}

PatchGrid read_tensor(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) fail(ErrorKind::Io, "missing embedding file: expected " + path.string());
    FtnsTensor tensor = read_ftns_file(path);
    if (tensor.dims.size() != 3) {
        fail(ErrorKind::Format, path.string() + ": expected a rank-3 (rows, cols, dim) tensor, got rank " +
                                    std::to_string(tensor.dims.size()));
    }
    PatchGrid grid;
    grid.rows = static_cast<int>(tensor.dims[0]);
    grid.cols = static_cast<int>(tensor.dims[1]);
    grid.dim = static_cast<int>(tensor.dims[2]);
    grid.values = std::move(tensor.values);
    grid.validate();
    return grid;
}

}  // namespace foundad
