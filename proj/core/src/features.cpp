#include <algorithm>
#include <cmath>
#include <random>

#include "segbench/error.hpp"
#include "segbench/forest.hpp"
#include "segbench/naive.hpp"

namespace segbench::ml {

void FeatureStack::row(std::size_t pixel, std::vector<double>& out) const {
  out.resize(planes.size());
  for (std::size_t f = 0; f < planes.size(); ++f) out[f] = planes[f][pixel];
}

FeatureStack extract_features(const Raster& img, const FeatureOptions& options) {
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.pixel_count();
  const Raster gray = to_gray(img);
  const Raster rgb = to_rgb(img);

  FeatureStack stack;
  stack.width = w;
  stack.height = h;

  std::vector<double> gray_plane(n), r(n), g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    gray_plane[i] = gray.data()[i];
    r[i] = rgb.data()[3 * i];
    g[i] = rgb.data()[3 * i + 1];
    b[i] = rgb.data()[3 * i + 2];
  }

  const auto grad = naive::sobel_gradients(gray);

  // Integer window sums keep the variance of flat regions exactly zero.
  const int radius = options.window_radius;
  std::vector<double> mean(n), stddev(n);
  const double area = static_cast<double>((2 * radius + 1) * (2 * radius + 1));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t s = 0;
      std::int64_t s2 = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          const std::int64_t v = gray.at(xx, yy);
          s += v;
          s2 += v * v;
        }
      }
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = static_cast<double>(s) / area;
      mean[i] = m;
      const double var = static_cast<double>(s2) / area - m * m;
      stddev[i] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
  }

  stack.names = {"gray", "R", "G", "B", "gradient_magnitude", "local_mean_r3", "local_std_r3"};
  stack.planes.push_back(std::move(gray_plane));
  stack.planes.push_back(std::move(r));
  stack.planes.push_back(std::move(g));
  stack.planes.push_back(std::move(b));
  stack.planes.push_back(grad.magnitude.values);
  stack.planes.push_back(std::move(mean));
  stack.planes.push_back(std::move(stddev));

  if (options.spatial) {
    std::vector<double> xn(n), yn(n);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        xn[i] = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
        yn[i] = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      }
    }
    stack.names.push_back("x_norm");
    stack.names.push_back("y_norm");
    stack.planes.push_back(std::move(xn));
    stack.planes.push_back(std::move(yn));
  }
  return stack;
}

TrainingSet training_set_from_seeds(const FeatureStack& stack, const LabelRaster& seeds) {
  if (static_cast<std::size_t>(seeds.width()) != static_cast<std::size_t>(stack.width) ||
      seeds.height() != stack.height) {
    throw Error(ErrorCode::DimensionMismatch, "seed raster does not match feature stack");
  }
  TrainingSet set;
  set.feature_count = stack.feature_count();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] == SeedLabel::Unknown) continue;
    for (std::size_t f = 0; f < set.feature_count; ++f) set.rows.push_back(stack.value(f, i));
    set.labels.push_back(seeds[i] == SeedLabel::Foreground ? 1 : 0);
  }
  return set;
}

void append_mask_samples(TrainingSet& set, const FeatureStack& stack, const BinaryMask& gt, std::size_t per_class,
                         std::uint64_t seed) {
  if (gt.width() != stack.width || gt.height() != stack.height) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match feature stack");
  }
  if (set.feature_count == 0) set.feature_count = stack.feature_count();
  if (set.feature_count != stack.feature_count()) {
    throw Error(ErrorCode::FeatureMismatch, "training set and feature stack disagree on feature count");
  }
  std::mt19937_64 rng(seed);
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i] == cls) idx.push_back(i);
    }
    const std::size_t take = std::min(per_class, idx.size());
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
      std::swap(idx[k], idx[pick(rng)]);
    }
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) {
      for (std::size_t f = 0; f < set.feature_count; ++f) set.rows.push_back(stack.value(f, i));
      set.labels.push_back(cls);
    }
  }
}

}  // namespace segbench::ml
