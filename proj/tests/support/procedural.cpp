#include "procedural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "foundad/image_io.hpp"

namespace foundad::testing {

namespace {

constexpr double kPhaseJitter = 1.0;

struct Color {
    float r, g, b;
};

Color mix(Color a, Color b, float t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

void put(Image& img, int y, int x, Color c) {
    img.at(y, x, 0) = std::clamp(c.r, 0.0f, 1.0f);
    img.at(y, x, 1) = std::clamp(c.g, 0.0f, 1.0f);
    img.at(y, x, 2) = std::clamp(c.b, 0.0f, 1.0f);
}

Color texel(Texture texture, double y, double x, double phase_a, double phase_b, SplitMix64& noise) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    switch (texture) {
        case Texture::Stripes: {
            const double u = x * std::cos(0.5) + y * std::sin(0.5);
            const float t = static_cast<float>(0.5 + 0.5 * std::sin(kTwoPi * u / 11.0 + phase_a));
            return mix({0.15f, 0.2f, 0.55f}, {0.9f, 0.85f, 0.6f}, t);
        }
        case Texture::Checker: {
            const int cy = static_cast<int>(std::floor((y + phase_a) / 7.0));
            const int cx = static_cast<int>(std::floor((x + phase_b) / 7.0));
            return ((cx + cy) & 1) ? Color{0.8f, 0.3f, 0.25f} : Color{0.3f, 0.25f, 0.2f};
        }
        case Texture::Dots: {
            const double py = std::fmod(y + phase_a, 13.0) - 6.5;
            const double px = std::fmod(x + phase_b, 13.0) - 6.5;
            const double r = std::sqrt(px * px + py * py);
            const float t = static_cast<float>(std::clamp(4.0 - r, 0.0, 1.0));
            return mix({0.75f, 0.75f, 0.7f}, {0.1f, 0.35f, 0.15f}, t);
        }
        case Texture::Waves: {
            const double v = std::sin(kTwoPi * x / 9.0 + phase_a) + std::sin(kTwoPi * y / 17.0 + phase_b);
            const float t = static_cast<float>(0.5 + 0.25 * v);
            return mix({0.2f, 0.45f, 0.35f}, {0.6f, 0.8f, 0.5f}, t);
        }
        case Texture::Grain: {
            const float n = static_cast<float>(noise.uniform(-0.08, 0.08));
            return {0.55f + n, 0.45f + n, 0.35f + n};
        }
    }
    return {0.0f, 0.0f, 0.0f};
}

Image render(Texture texture, int size, double phase_a, double phase_b, SplitMix64& noise) {
    Image img(size, size, 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) put(img, y, x, texel(texture, y, x, phase_a, phase_b, noise));
    }
    return img;
}

}  // namespace

std::string texture_name(Texture texture) {
    switch (texture) {
        case Texture::Stripes: return "stripes";
        case Texture::Checker: return "checker";
        case Texture::Dots: return "dots";
        case Texture::Waves: return "waves";
        case Texture::Grain: return "grain";
    }
    return "unknown";
}

Image render_texture(Texture texture, int size, SplitMix64& rng) {
    // Category parameters are fixed; instances differ by a small phase jitter,
    // a global gain and pixel noise.
    const double phase_a = 3.0 + rng.uniform(-kPhaseJitter, kPhaseJitter);
    const double phase_b = 5.0 + rng.uniform(-kPhaseJitter, kPhaseJitter);
    const float gain = static_cast<float>(rng.uniform(0.97, 1.03));
    SplitMix64 noise(rng.next());
    Image img = render(texture, size, phase_a, phase_b, noise);
    for (float& v : img.values) v = std::clamp(v * gain + static_cast<float>(noise.uniform(-0.02, 0.02)), 0.0f, 1.0f);
    return img;
}

DefectImage render_defect(Texture texture, int size, SplitMix64& rng) {
    DefectImage out{render_texture(texture, size, rng), BinaryMask(size, size)};
    const int w = 12 + static_cast<int>(rng.below(17));
    const int h = 12 + static_cast<int>(rng.below(17));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - w)));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - h)));
    const int kind = static_cast<int>(rng.below(3));
    const auto& textures = all_textures();
    const Texture foreign = textures[(static_cast<std::size_t>(texture) + 1 + rng.below(textures.size() - 1)) % textures.size()];
    const Image other = render_texture(foreign, size, rng);
    const Color blot = rng.uniform01() < 0.5 ? Color{0.05f, 0.05f, 0.05f} : Color{0.95f, 0.95f, 0.9f};
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            Color c{out.image.at(y, x, 0), out.image.at(y, x, 1), out.image.at(y, x, 2)};
            if (kind == 0) {
                c = blot;
            } else if (kind == 1) {
                c = {other.at(y, x, 0), other.at(y, x, 1), other.at(y, x, 2)};
            } else {
                c = {c.g, c.b, c.r};
            }
            put(out.image, y, x, c);
            out.mask.at(y, x) = 1;
        }
    }
    return out;
}

Image square_fixture(int size, int side, bool inverted) {
    Image img(size, size, 3, inverted ? 1.0f : 0.0f);
    const int start = (size - side) / 2;
    for (int y = start; y < start + side; ++y) {
        for (int x = start; x < start + side; ++x) {
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = inverted ? 0.0f : 1.0f;
        }
    }
    return img;
}

void write_rgb_png(const std::filesystem::path& path, const Image& image) {
    std::vector<std::uint8_t> bytes(image.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.values[i], 0.0f, 1.0f) * 255.0f));
    }
    std::filesystem::create_directories(path.parent_path());
    write_png(path, image.height, image.width, image.channels, bytes);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.values[i] ? 255 : 0;
    std::filesystem::create_directories(path.parent_path());
    write_png(path, mask.height, mask.width, 1, bytes);
}

void write_mvtec_tree(const std::filesystem::path& root, int size, int train, int test_good, int test_bad, std::uint64_t seed,
                      const std::vector<Texture>& textures) {
    char name[32];
    for (const Texture texture : textures) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(texture)));
        const std::filesystem::path cat = root / texture_name(texture);
        for (int i = 0; i < train; ++i) {
            std::snprintf(name, sizeof(name), "%03d.png", i);
            write_rgb_png(cat / "train" / "good" / name, render_texture(texture, size, rng));
        }
        for (int i = 0; i < test_good; ++i) {
            std::snprintf(name, sizeof(name), "%03d.png", i);
            write_rgb_png(cat / "test" / "good" / name, render_texture(texture, size, rng));
        }
        for (int i = 0; i < test_bad; ++i) {
            const DefectImage defect = render_defect(texture, size, rng);
            std::snprintf(name, sizeof(name), "%03d.png", i);
            write_rgb_png(cat / "test" / "defect" / name, defect.image);
            std::snprintf(name, sizeof(name), "%03d_mask.png", i);
            write_mask_png(cat / "ground_truth" / "defect" / name, defect.mask);
        }
    }
}

}  // namespace foundad::testing
