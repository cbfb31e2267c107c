#include "segbench/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segbench/error.hpp"

namespace segbench {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "raster dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Raster::Raster(int width, int height, int channels)
    : Raster(width, height, channels,
             std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                       static_cast<std::size_t>(std::max(height, 0)) *
                                       static_cast<std::size_t>(std::max(channels, 0)))) {}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::UnsupportedFormat, "channels must be 1 or 3, got " + std::to_string(channels));
  }
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::DimensionMismatch, "raster data length does not match width*height*channels");
  }
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  labels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  check_dims(width, height);
  if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::DimensionMismatch, "mask label count does not match width*height");
  }
  for (auto& v : labels_) v = v ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

LabelRaster::LabelRaster(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), SeedLabel::Unknown);
}

std::size_t LabelRaster::count(SeedLabel v) const noexcept {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), v));
}

Raster to_gray(const Raster& img) {
  if (img.channels() == 1) return img;
  Raster out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double v = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

Raster to_rgb(const Raster& img) {
  if (img.channels() == 3) return img;
  Raster out(img.width(), img.height(), 3);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

Raster mask_to_raster(const BinaryMask& mask) {
  Raster out(mask.width(), mask.height(), 1);
  auto dst = out.data();
  for (std::size_t i = 0; i < mask.size(); ++i) dst[i] = mask[i] ? 255 : 0;
  return out;
}

}  // namespace segbench
