#include <cmath>
#include <deque>
#include <string>

#include "segbench/error.hpp"
#include "segbench/naive.hpp"

namespace segbench::naive {

BinaryMask region_grow(const Raster& gray, const LabelRaster& seeds, double tau) {
  if (gray.channels() != 1) {
    throw Error(ErrorCode::NotGrayscale, "expected 1 channel, got " + std::to_string(gray.channels()));
  }
  if (seeds.width() != gray.width() || seeds.height() != gray.height()) {
    throw Error(ErrorCode::DimensionMismatch, "seed raster does not match image dimensions");
  }
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");

  const int w = gray.width();
  const int h = gray.height();
  BinaryMask region(w, h);
  std::deque<std::size_t> frontier;
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] == SeedLabel::Foreground) {
      region.set(i, true);
      frontier.push_back(i);
      sum += gray.data()[i];
      count += 1.0;
    }
  }
  if (frontier.empty()) throw Error(ErrorCode::NoSeeds, "region growing needs at least one foreground seed");

  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    const int nx[4] = {x, x - 1, x + 1, x};
    const int ny[4] = {y - 1, y, y, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
      if (region[j] || seeds[j] == SeedLabel::Background) continue;
      const double v = gray.data()[j];
      if (std::abs(v - sum / count) <= tau) {
        region.set(j, true);
        sum += v;
        count += 1.0;
        frontier.push_back(j);
      }
    }
  }
  return region;
}

}  // namespace segbench::naive
