#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>

#include "segbench/error.hpp"
#include "segbench/morphology.hpp"
#include "segbench/naive.hpp"

namespace segbench::naive {
namespace {

void require_gray(const Raster& img) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::NotGrayscale, "expected 1 channel, got " + std::to_string(img.channels()));
  }
}

int clamp_index(int v, int n) { return std::clamp(v, 0, n - 1); }

}  // namespace

std::size_t EdgeMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

Raster gaussian_blur(const Raster& gray, double sigma) {
  require_gray(gray);
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = gray.width();
  const int h = gray.height();

  FloatPlane horizontal(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] * gray.at(clamp_index(x + i, w), y);
      }
      horizontal.at(x, y) = acc;
    }
  }
  Raster out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] * horizontal.at(x, clamp_index(y + i, h));
      }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

Gradients sobel_gradients(const Raster& gray) {
  require_gray(gray);
  const int w = gray.width();
  const int h = gray.height();
  Gradients g{FloatPlane(w, h), FloatPlane(w, h)};
  auto px = [&](int x, int y) { return static_cast<double>(gray.at(clamp_index(x, w), clamp_index(y, h))); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
      g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
      g.direction.at(x, y) = std::atan2(gy, gx);
    }
  }
  return g;
}

EdgeMap non_maximum_suppression(const Gradients& g) {
  const int w = g.magnitude.width;
  const int h = g.magnitude.height;
  EdgeMap out(w, h);
  auto mag = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : g.magnitude.at(x, y); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = g.magnitude.at(x, y);
      if (!(m > 0.0)) continue;
      double deg = g.direction.at(x, y) * 180.0 / std::numbers::pi;
      if (deg < 0.0) deg += 180.0;
      if (deg >= 180.0) deg -= 180.0;
      int dx = 1, dy = 0;
      if (deg >= 22.5 && deg < 67.5) {
        dx = 1;
        dy = 1;
      } else if (deg >= 67.5 && deg < 112.5) {
        dx = 0;
        dy = 1;
      } else if (deg >= 112.5 && deg < 157.5) {
        dx = -1;
        dy = 1;
      }
      const double behind = mag(x - dx, y - dy);
      const double ahead = mag(x + dx, y + dy);
      if (m > behind && m >= ahead) out.set(x, y, true);
    }
  }
  return out;
}

EdgeMap canny(const Raster& gray, double sigma, double low, double high) {
  require_gray(gray);
  if (!(low > 0.0) || !(high > low)) {
    throw Error(ErrorCode::InvalidThresholds, "canny requires 0 < low < high");
  }
  const Gradients g = sobel_gradients(gaussian_blur(gray, sigma));
  const EdgeMap thin = non_maximum_suppression(g);
  const int w = gray.width();
  const int h = gray.height();

  EdgeMap out(w, h);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thin.at(x, y) && g.magnitude.at(x, y) >= high) {
        out.set(x, y, true);
        queue.emplace_back(x, y);
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || out.at(nx, ny)) continue;
        if (thin.at(nx, ny) && g.magnitude.at(nx, ny) >= low) {
          out.set(nx, ny, true);
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

BinaryMask edges_to_mask(const EdgeMap& edges, int closing_iterations) {
  const int w = edges.width;
  const int h = edges.height;
  const BinaryMask closed = morph::close(BinaryMask(w, h, edges.flags), closing_iterations);

  std::vector<std::uint8_t> exterior(closed.size(), 0);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!closed[i] && !exterior[i]) {
      exterior[i] = 1;
      queue.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h) seed(nx, ny);
      }
    }
  }
  BinaryMask out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, !exterior[i]);
  return out;
}

}  // namespace segbench::naive
