#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "foundad/image.hpp"
#include "foundad/rng.hpp"

namespace foundad::testing {

/// Parametric textures standing in for dataset categories. Periods are coprime
/// with common patch sizes so one image covers many texture phases.
enum class Texture { Stripes, Checker, Dots, Waves, Grain };

inline const std::vector<Texture>& all_textures() {
    static const std::vector<Texture> textures{Texture::Stripes, Texture::Checker, Texture::Dots, Texture::Waves, Texture::Grain};
    return textures;
}

std::string texture_name(Texture texture);

/// Normal instance with a random phase drawn from rng.
Image render_texture(Texture texture, int size, SplitMix64& rng);

struct DefectImage {
    Image image;
    BinaryMask mask;
};

/// Normal instance with one rectangular defect (solid blot, foreign texture or
/// color shift) of side 12..28 px at a random position.
DefectImage render_defect(Texture texture, int size, SplitMix64& rng);

/// Bright square of side `side` centered on a dark field (or inverted).
Image square_fixture(int size, int side, bool inverted);

/// Writes an MVTec-style tree with the given counts per category.
void write_mvtec_tree(const std::filesystem::path& root, int size, int train, int test_good, int test_bad, std::uint64_t seed,
                      const std::vector<Texture>& textures = all_textures());

void write_rgb_png(const std::filesystem::path& path, const Image& image);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace foundad::testing
