#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "foundad/image.hpp"

namespace foundad {

/// rows x cols grid of dim-dimensional patch embeddings, stored row-major with
/// the channel index fastest. Row-major flattening gives the token order.
struct PatchGrid {
    int rows = 0;
    int cols = 0;
    int dim = 0;
    std::vector<float> values;

    PatchGrid() = default;
    PatchGrid(int r, int c, int d, float fill = 0.0f)
        : rows(r), cols(c), dim(d), values(static_cast<std::size_t>(r) * c * d, fill) {}

    int tokens() const noexcept { return rows * cols; }
    float& at(int r, int c, int ch) noexcept { return values[(static_cast<std::size_t>(r) * cols + c) * dim + ch]; }
    float at(int r, int c, int ch) const noexcept { return values[(static_cast<std::size_t>(r) * cols + c) * dim + ch]; }
    bool same_shape(const PatchGrid& other) const noexcept {
        return rows == other.rows && cols == other.cols && dim == other.dim;
    }
    /// Throws unless dimensions are positive, the buffer matches and all values are finite.
    void validate() const;
};

/// Frozen random-projection stand-in for a foundation encoder.
struct ToyEncoderSpec {
    int dim = 64;
    int patch_size = 16;
    std::uint64_t weight_seed = 7;
};

/// Precomputed embeddings at <directory>/<image id with extension .ftns>.
struct FileProviderSpec {
    std::filesystem::path directory;
};

using ProviderSpec = std::variant<ToyEncoderSpec, FileProviderSpec>;

/// Parses "toy:dim=64,patch=16,seed=7" or "file:dir=<path>".
ProviderSpec parse_provider_spec(std::string_view text);
std::string describe_provider(const ProviderSpec& spec);

/// Toy weights W (dim x 3*patch^2, row-major), entries a * (2u - 1) with
/// a = (3*patch^2)^-1/2 and u the successive uniform01 draws of SplitMix64(seed).
std::vector<float> toy_encoder_weights(int dim, int patch_size, std::uint64_t weight_seed);

/// y = tanh(W v) per non-overlapping patch, where v flattens the patch in
/// (row, column, channel) order. No bias.
PatchGrid toy_encode(const Image& image, int dim, int patch_size, std::uint64_t weight_seed);

class EmbeddingProvider {
public:
    explicit EmbeddingProvider(ProviderSpec spec);

    const ProviderSpec& spec() const noexcept { return spec_; }
    bool encodes_pixels() const noexcept { return std::holds_alternative<ToyEncoderSpec>(spec_); }

    /// Embedding width; 0 for file providers until a tensor has been read.
    int dim() const noexcept;

    /// Encodes raw pixels. File providers refuse because no precomputed
    /// embedding exists for novel (e.g. synthesized) pixels.
    PatchGrid encode(const Image& pixels) const;

    /// Encodes a dataset image: file providers read the stored tensor, toy
    /// providers encode the supplied pixels.
    PatchGrid encode(std::string_view image_id, const Image& pixels) const;

    std::filesystem::path embedding_path(std::string_view image_id) const;

    /// FNV-1a over the encoder weight bytes; stays constant for a frozen encoder.
    std::uint64_t weight_fingerprint() const noexcept;

private:
    ProviderSpec spec_;
    std::vector<float> weights_;  // toy only
};

void write_tensor(const std::filesystem::path& path, const PatchGrid& grid);
PatchGrid read_tensor(const std::filesystem::path& path);

}  // namespace foundad
