#include "foundad/image_io.hpp"

#include <png.h>
#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "foundad/error.hpp"

namespace foundad {

namespace {

struct FileCloser {
    void operator()(std::FILE* file) const noexcept { std::fclose(file); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr file(std::fopen(path.string().c_str(), mode));
    if (!file) fail(ErrorKind::Io, "cannot open file: " + path.string());
    return file;
}

std::array<unsigned char, 8> read_signature(const std::filesystem::path& path) {
    std::array<unsigned char, 8> sig{};
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open file: " + path.string());
    in.read(reinterpret_cast<char*>(sig.data()), sig.size());
    if (in.gcount() < 3) fail(ErrorKind::Format, "file too short to be an image: " + path.string());
    return sig;
}

bool is_png(const std::array<unsigned char, 8>& sig) { return png_sig_cmp(sig.data(), 0, 8) == 0; }
bool is_jpeg(const std::array<unsigned char, 8>& sig) { return sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF; }

RawImage decode_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, "libpng initialization failed for " + path.string());
    }
    RawImage image;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Format, "corrupt PNG: " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    image.width = static_cast<int>(png_get_image_width(png, info));
    image.height = static_cast<int>(png_get_image_height(png, info));
    image.channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    image.bytes.resize(stride * static_cast<std::size_t>(image.height));
    rows.resize(static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = image.bytes.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    if (image.channels != 1 && image.channels != 3) fail(ErrorKind::Format, "unsupported PNG channel layout: " + path.string());
    return image;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* manager = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    std::longjmp(manager->jump, 1);
}

RawImage decode_jpeg(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    jpeg_decompress_struct cinfo{};
    JpegErrorManager errors{};
    cinfo.err = jpeg_std_error(&errors.base);
    errors.base.error_exit = jpeg_error_exit;
    RawImage image;
    if (setjmp(errors.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(ErrorKind::Format, "corrupt JPEG: " + path.string());
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.jpeg_color_space == JCS_GRAYSCALE ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    image.width = static_cast<int>(cinfo.output_width);
    image.height = static_cast<int>(cinfo.output_height);
    image.channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    image.bytes.resize(stride * image.height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = image.bytes.data() + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return image;
}

template <typename Sample>
void write_png_impl(const std::filesystem::path& path, int height, int width, int channels, int bit_depth,
                    const Sample* samples) {
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "libpng initialization failed for " + path.string());
    }
    std::vector<png_byte> row(static_cast<std::size_t>(width) * channels * sizeof(Sample));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "failed writing PNG: " + path.string());
    }
    png_init_io(png, file.get());
    const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t per_row = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y) {
        const Sample* src = samples + per_row * y;
        for (std::size_t i = 0; i < per_row; ++i) {
            if constexpr (sizeof(Sample) == 1) {
                row[i] = src[i];
            } else {
                row[2 * i] = static_cast<png_byte>(src[i] >> 8);
                row[2 * i + 1] = static_cast<png_byte>(src[i] & 0xFF);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

RawImage decode_image(const std::filesystem::path& path) {
    const auto sig = read_signature(path);
    if (is_png(sig)) return decode_png(path);
    if (is_jpeg(sig)) return decode_jpeg(path);
    fail(ErrorKind::Format, "unrecognized image format: " + path.string());
}

bool has_image_signature(const std::filesystem::path& path) {
    try {
        const auto sig = read_signature(path);
        return is_png(sig) || is_jpeg(sig);
    } catch (const Error&) {
        return false;
    }
}

bool is_image_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void write_png(const std::filesystem::path& path, int height, int width, int channels,
               std::span<const std::uint8_t> bytes) {
    if (channels != 1 && channels != 3) fail(ErrorKind::InvalidArgument, "write_png: channels must be 1 or 3");
    if (bytes.size() != static_cast<std::size_t>(height) * width * channels) {
        fail(ErrorKind::ShapeMismatch, "write_png: buffer size does not match dimensions");
    }
    write_png_impl(path, height, width, channels, 8, bytes.data());
}

void write_png_gray16(const std::filesystem::path& path, int height, int width,
                      std::span<const std::uint16_t> samples) {
    if (samples.size() != static_cast<std::size_t>(height) * width) {
        fail(ErrorKind::ShapeMismatch, "write_png_gray16: buffer size does not match dimensions");
    }
    write_png_impl(path, height, width, 1, 16, samples.data());
}

}  // namespace foundad
