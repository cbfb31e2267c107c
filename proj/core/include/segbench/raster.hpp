#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segbench {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// 8-bit image, row-major with interleaved channels. Channels is 1 (gray)
/// or 3 (RGB).
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Per-pixel foreground/background labeling; labels are exactly 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);
  BinaryMask(int width, int height, std::vector<std::uint8_t> labels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::uint8_t at(int x, int y) const { return labels_[index(x, y)]; }
  void set(int x, int y, bool fg) { labels_[index(x, y)] = fg ? 1 : 0; }
  std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
  void set(std::size_t i, bool fg) { labels_[i] = fg ? 1 : 0; }

  std::size_t count() const noexcept;
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> labels_;
};

enum class SeedLabel : std::uint8_t { Unknown = 0, Foreground = 1, Background = 2 };

/// Hard seed carrier produced by rasterizing an annotation.
class LabelRaster {
 public:
  LabelRaster() = default;
  LabelRaster(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  SeedLabel at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, SeedLabel v) { values_[index(x, y)] = v; }
  SeedLabel operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, SeedLabel v) { values_[i] = v; }

  std::size_t count(SeedLabel v) const noexcept;
  bool has_foreground() const noexcept { return count(SeedLabel::Foreground) > 0; }
  bool has_background() const noexcept { return count(SeedLabel::Background) > 0; }

  friend bool operator==(const LabelRaster&, const LabelRaster&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<SeedLabel> values_;
};

/// Floating-point single-plane raster (gradients, probabilities).
struct FloatPlane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  FloatPlane() = default;
  FloatPlane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// ITU-R 601 luma: round(0.299 R + 0.587 G + 0.114 B). Gray input is
/// returned unchanged.
Raster to_gray(const Raster& img);

/// Replicates a gray raster into three channels; RGB input is returned as is.
Raster to_rgb(const Raster& img);

/// 0 -> 0, 1 -> 255 single-channel raster.
Raster mask_to_raster(const BinaryMask& mask);

}  // namespace segbench
