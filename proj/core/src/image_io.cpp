#include "segbench/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "segbench/error.hpp"

namespace segbench {
namespace {

struct ReadSource {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t pos = 0;
};

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  bool sixteen_bit = false;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  char message[256] = {};
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<ReadSource*>(png_get_io_ptr(png));
  if (src->pos + length > src->size) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->data + src->pos, length);
  src->pos += length;
}

void error_callback(png_structp png, png_const_charp message) {
  auto* out = static_cast<Decoded*>(png_get_error_ptr(png));
  if (out) std::snprintf(out->message, sizeof(out->message), "%s", message);
  png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

// Keep this free of automatic objects with destructors: libpng reports
// errors through longjmp.
bool decode_into(png_structp png, png_infop info, ReadSource* src, Decoded* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, src, read_callback);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) {
    out->sixteen_bit = true;
    return false;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    std::snprintf(out->message, sizeof(out->message), "unsupported channel count %d", channels);
    return false;
  }
  out->width = static_cast<int>(width);
  out->height = static_cast<int>(height);
  out->channels = channels;
  out->pixels.resize(static_cast<std::size_t>(width) * height * static_cast<std::size_t>(channels));
  out->rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    out->rows[y] = out->pixels.data() + static_cast<std::size_t>(y) * width * static_cast<std::size_t>(channels);
  }
  png_read_image(png, out->rows.data());
  png_read_end(png, nullptr);
  return true;
}

struct EncodeTarget {
  std::vector<std::uint8_t>* bytes = nullptr;
  char message[256] = {};
};

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* target = static_cast<EncodeTarget*>(png_get_io_ptr(png));
  target->bytes->insert(target->bytes->end(), data, data + length);
}

void flush_callback(png_structp) {}

void encode_error_callback(png_structp png, png_const_charp message) {
  auto* target = static_cast<EncodeTarget*>(png_get_error_ptr(png));
  if (target) std::snprintf(target->message, sizeof(target->message), "%s", message);
  png_longjmp(png, 1);
}

bool encode_into(png_structp png, png_infop info, const Raster* img, png_bytep* rows, EncodeTarget* target) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, target, write_callback, flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img->width()), static_cast<png_uint_32>(img->height()), 8,
               img->channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

Raster decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "not a PNG stream");
  }
  Decoded decoded;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &decoded, error_callback, warning_callback);
  if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }
  ReadSource src{bytes.data(), bytes.size(), 0};
  const bool ok = decode_into(png, info, &src, &decoded);
  png_destroy_read_struct(&png, &info, nullptr);
  if (decoded.sixteen_bit) throw Error(ErrorCode::UnsupportedFormat, "16-bit PNG images are not supported");
  if (!ok) throw Error(ErrorCode::UnsupportedFormat, std::string("PNG decode failed: ") + decoded.message);
  return Raster(decoded.width, decoded.height, decoded.channels, std::move(decoded.pixels));
}

std::vector<std::uint8_t> encode_png(const Raster& img) {
  if (img.empty()) throw Error(ErrorCode::InvalidArgument, "cannot encode an empty raster");
  std::vector<std::uint8_t> bytes;
  EncodeTarget target{&bytes, {}};
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &target, encode_error_callback, warning_callback);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  auto* base = const_cast<std::uint8_t*>(img.data().data());
  const std::size_t stride = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.channels());
  for (int y = 0; y < img.height(); ++y) rows[static_cast<std::size_t>(y)] = base + static_cast<std::size_t>(y) * stride;
  const bool ok = encode_into(png, info, &img, rows.data(), &target);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + target.message);
  return bytes;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Raster load_image(const std::filesystem::path& path) {
  return decode_png(read_file_bytes(path));
}

void save_image(const Raster& img, const std::filesystem::path& path) {
  write_file_bytes(path, encode_png(img));
}

BinaryMask threshold_mask(const Raster& gray, std::uint8_t threshold) {
  if (gray.channels() != 1) throw Error(ErrorCode::UnsupportedFormat, "mask images must be single-channel");
  BinaryMask mask(gray.width(), gray.height());
  auto px = gray.data();
  for (std::size_t i = 0; i < px.size(); ++i) mask.set(i, px[i] >= threshold);
  return mask;
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes) {
  return threshold_mask(decode_png(bytes));
}

std::vector<std::uint8_t> encode_mask(const BinaryMask& mask) {
  return encode_png(mask_to_raster(mask));
}

BinaryMask load_mask(const std::filesystem::path& path) {
  return decode_mask(read_file_bytes(path));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  write_file_bytes(path, encode_mask(mask));
}

}  // namespace segbench
