#include "segbench/morphology.hpp"

#include <deque>
#include <limits>

namespace segbench::morph {
namespace {

BinaryMask dilate_once(const BinaryMask& in) {
  BinaryMask out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      bool any = false;
      for (int dy = -1; dy <= 1 && !any; ++dy) {
        for (int dx = -1; dx <= 1 && !any; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (in.contains(nx, ny) && in.at(nx, ny)) any = true;
        }
      }
      out.set(x, y, any);
    }
  }
  return out;
}

BinaryMask erode_once(const BinaryMask& in, bool border_is_foreground) {
  BinaryMask out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      bool all = true;
      for (int dy = -1; dy <= 1 && all; ++dy) {
        for (int dx = -1; dx <= 1 && all; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!in.contains(nx, ny)) {
            all = border_is_foreground;
          } else if (!in.at(nx, ny)) {
            all = false;
          }
        }
      }
      out.set(x, y, all);
    }
  }
  return out;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int iterations) {
  BinaryMask out = mask;
  for (int i = 0; i < iterations; ++i) out = dilate_once(out);
  return out;
}

BinaryMask erode(const BinaryMask& mask, int iterations, bool border_is_foreground) {
  BinaryMask out = mask;
  for (int i = 0; i < iterations; ++i) out = erode_once(out, border_is_foreground);
  return out;
}

BinaryMask close(const BinaryMask& mask, int iterations) {
  return erode(dilate(mask, iterations), iterations, true);
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out.set(i, !mask[i]);
  return out;
}

std::vector<int> depth_transform(const std::vector<std::uint8_t>& member, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<int> depth(n, 0);
  std::deque<std::size_t> queue;
  constexpr int kUnset = std::numeric_limits<int>::max();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (!member[i]) continue;
      depth[i] = kUnset;
      const bool on_border = x == 0 || y == 0 || x == width - 1 || y == height - 1;
      bool touches_outside = on_border;
      if (!touches_outside) {
        touches_outside = !member[i - 1] || !member[i + 1] || !member[i - width] || !member[i + width];
      }
      if (touches_outside) {
        depth[i] = 1;
        queue.push_back(i);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % width);
    const int y = static_cast<int>(i / width);
    const int nx[4] = {x, x - 1, x + 1, x};
    const int ny[4] = {y - 1, y, y, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= width || ny[k] >= height) continue;
      const std::size_t j = static_cast<std::size_t>(ny[k]) * width + nx[k];
      if (member[j] && depth[j] == kUnset) {
        depth[j] = depth[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return depth;
}

Components connected_components(const std::vector<std::uint8_t>& member, const std::vector<std::uint8_t>& key,
                                int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  Components out;
  out.label.assign(n, -1);
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (!member[start] || out.label[start] != -1) continue;
    const int id = static_cast<int>(out.sizes.size());
    out.sizes.push_back(0);
    out.first_pixel.push_back(start);
    out.label[start] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      ++out.sizes.back();
      const int x = static_cast<int>(i % width);
      const int y = static_cast<int>(i / width);
      const int nx[4] = {x, x - 1, x + 1, x};
      const int ny[4] = {y - 1, y, y, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= width || ny[k] >= height) continue;
        const std::size_t j = static_cast<std::size_t>(ny[k]) * width + nx[k];
        if (member[j] && out.label[j] == -1 && key[j] == key[i]) {
          out.label[j] = id;
          queue.push_back(j);
        }
      }
    }
  }
  return out;
}

}  // namespace segbench::morph
