#pragma once

#include <cstddef>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench::morph {

/// 3x3 square dilation; pixels outside the image count as background.
BinaryMask dilate(const BinaryMask& mask, int iterations = 1);

/// 3x3 square erosion. When `border_is_foreground` is set, pixels outside
/// the image do not erode the mask (closing semantics); otherwise the
/// border acts as background.
BinaryMask erode(const BinaryMask& mask, int iterations = 1, bool border_is_foreground = false);

/// Dilate `iterations` times, then erode `iterations` times.
BinaryMask close(const BinaryMask& mask, int iterations);

BinaryMask complement(const BinaryMask& mask);

/// City-block (4-connectivity) distance transform of the set of pixels for
/// which `member[i]` is true. A member pixel 4-adjacent to a non-member, or
/// to the image border, has depth 1; non-members have depth 0.
std::vector<int> depth_transform(const std::vector<std::uint8_t>& member, int width, int height);

struct Components {
  std::vector<int> label;                 // -1 for non-members
  std::vector<std::size_t> sizes;         // indexed by component id
  std::vector<std::size_t> first_pixel;   // row-major first pixel per component
};

/// 4-connected components of member pixels. Two members join only when
/// `key` agrees on both (pass an all-zero key for plain connectivity).
/// Component ids are assigned in row-major order of their first pixel.
Components connected_components(const std::vector<std::uint8_t>& member, const std::vector<std::uint8_t>& key,
                                int width, int height);

}  // namespace segbench::morph
