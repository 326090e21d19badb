#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace foundad {

/// Dense f32 tensor as stored in an FTNS file.
///
/// FTNS layout (all integers little-endian):
///   bytes 0..3   magic "FTNS"
///   u32          version (1)
///   u32          rank
///   rank x u32   dims
///   prod(dims) x f32 values, row-major (last dim fastest)
struct FtnsTensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> values;

    std::size_t element_count() const noexcept;
};

inline constexpr std::uint32_t kFtnsVersion = 1;

void write_ftns(std::ostream& out, std::span<const std::uint32_t> dims, std::span<const float> values);
FtnsTensor read_ftns(std::istream& in);

void write_ftns_file(const std::filesystem::path& path, std::span<const std::uint32_t> dims, std::span<const float> values);
FtnsTensor read_ftns_file(const std::filesystem::path& path);

// Little-endian primitives shared with the checkpoint container.
void write_u32(std::ostream& out, std::uint32_t value);
std::uint32_t read_u32(std::istream& in, const char* context);

}  // namespace foundad
