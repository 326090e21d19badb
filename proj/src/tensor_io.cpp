#include "foundad/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "foundad/error.hpp"

namespace foundad {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'T', 'N', 'S'};
// 2^32 floats (16 GiB) is far beyond any patch grid or checkpoint tensor.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;
constexpr std::uint32_t kMaxRank = 16;

void write_f32(std::ostream& out, float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    write_u32(out, bits);
}

}  // namespace

std::size_t FtnsTensor::element_count() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

void write_u32(std::ostream& out, std::uint32_t value) {
    const std::array<char, 4> bytes{static_cast<char>(value & 0xFF), static_cast<char>((value >> 8) & 0xFF),
                                    static_cast<char>((value >> 16) & 0xFF), static_cast<char>((value >> 24) & 0xFF)};
    out.write(bytes.data(), bytes.size());
}

std::uint32_t read_u32(std::istream& in, const char* context) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in.gcount() != 4) fail(ErrorKind::Format, std::string("truncated file while reading ") + context);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_ftns(std::ostream& out, std::span<const std::uint32_t> dims, std::span<const float> values) {
    std::uint64_t expected = 1;
    for (auto d : dims) expected *= d;
    if (expected != values.size()) fail(ErrorKind::ShapeMismatch, "FTNS dims do not match value count");
    out.write(kMagic.data(), kMagic.size());
    write_u32(out, kFtnsVersion);
    write_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) write_u32(out, d);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (float v : values) write_f32(out, v);
    }
    if (!out) fail(ErrorKind::Io, "failed writing FTNS tensor");
}

FtnsTensor read_ftns(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMagic) fail(ErrorKind::Format, "not an FTNS tensor");
    const std::uint32_t version = read_u32(in, "FTNS version");
    if (version != kFtnsVersion) fail(ErrorKind::Format, "unsupported FTNS version " + std::to_string(version));
    const std::uint32_t rank = read_u32(in, "FTNS rank");
    if (rank > kMaxRank) fail(ErrorKind::Format, "FTNS rank " + std::to_string(rank) + " exceeds limit");

    FtnsTensor tensor;
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(in, "FTNS dims");
        tensor.dims.push_back(d);
        count *= d;
        if (count > kMaxElements) fail(ErrorKind::Format, "FTNS dims overflow the element limit");
    }
    tensor.values.resize(static_cast<std::size_t>(count));
    in.read(reinterpret_cast<char*>(tensor.values.data()), static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::uint64_t>(in.gcount()) != count * sizeof(float)) fail(ErrorKind::Format, "truncated FTNS payload");
    if constexpr (std::endian::native != std::endian::little) {
        for (float& v : tensor.values) {
            auto bits = std::bit_cast<std::uint32_t>(v);
            bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
            v = std::bit_cast<float>(bits);
        }
    }
    return tensor;
}

void write_ftns_file(const std::filesystem::path& path, std::span<const std::uint32_t> dims, std::span<const float> values) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot create " + path.string());
    write_ftns(out, dims, values);
}

FtnsTensor read_ftns_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open tensor file " + path.string());
    try {
        return read_ftns(in);
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

}  // namespace foundad
