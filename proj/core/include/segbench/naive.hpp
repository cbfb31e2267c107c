#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench::naive {

struct Histogram256 {
  std::array<std::uint64_t, 256> counts{};

  std::uint64_t total() const noexcept;
};

Histogram256 histogram(const Raster& gray);

/// Otsu's threshold: maximizes the between-class variance
/// w0(t) * w1(t) * (mu0(t) - mu1(t))^2 with classes {v <= t} and {v > t}.
/// Thresholds leaving a class empty score zero; ties go to the smallest t,
/// so a single-valued histogram yields 0.
int otsu_threshold(const Histogram256& hist);

/// mask[p] = 1 iff gray[p] > t.
BinaryMask threshold_segment(const Raster& gray, int t);

/// Gray conversion, Otsu threshold and segmentation in one call.
BinaryMask otsu_segment(const Raster& img);

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-edge borders, rounded back to 8 bits.
Raster gaussian_blur(const Raster& gray, double sigma);

struct Gradients {
  FloatPlane magnitude;
  FloatPlane direction;  // radians, atan2(gy, gx)
};

/// 3x3 Sobel with clamp-to-edge borders. gx responds to left-to-right
/// increases, gy to top-to-bottom increases.
Gradients sobel_gradients(const Raster& gray);

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> flags;

  EdgeMap() = default;
  EdgeMap(int w, int h) : width(w), height(h), flags(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  std::uint8_t at(int x, int y) const { return flags[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, bool on) { flags[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0; }
  std::size_t count() const noexcept;
  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;
};

/// Thin edges: a pixel survives when its gradient magnitude is positive and
/// is a maximum along the quantized gradient direction (0, 45, 90, 135 deg).
/// Plateaus keep the pixel on the negative side of the direction only.
EdgeMap non_maximum_suppression(const Gradients& g);

/// Blur -> Sobel -> non-maximum suppression -> hysteresis with 8-connected
/// tracking from pixels >= high through pixels >= low.
EdgeMap canny(const Raster& gray, double sigma, double low, double high);

/// Closes the edge map (3x3 square, `closing_iterations` each way), then
/// flood-fills the exterior from the border over 8-connectivity; everything
/// not reached becomes foreground.
BinaryMask edges_to_mask(const EdgeMap& edges, int closing_iterations = 2);

/// Seeded region growing from all foreground seeds (row-major), FIFO over
/// 4-connectivity. A neighbor joins when |I - running mean| <= tau; the mean
/// is updated on every accepted pixel. Background seeds never join.
BinaryMask region_grow(const Raster& gray, const LabelRaster& seeds, double tau);

}  // namespace segbench::naive
