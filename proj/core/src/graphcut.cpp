#include "segbench/graphcut.hpp"

#include <algorithm>
#include <cmath>

#include "segbench/error.hpp"
#include "segbench/maxflow.hpp"

namespace segbench::opt {

double default_sigma_b(const Raster& img) {
  const Raster gray = to_gray(img);
  const int w = gray.width();
  const int h = gray.height();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) {
        sum += std::abs(static_cast<double>(gray.at(x + 1, y)) - gray.at(x, y));
        ++pairs;
      }
      if (y + 1 < h) {
        sum += std::abs(static_cast<double>(gray.at(x, y + 1)) - gray.at(x, y));
        ++pairs;
      }
    }
  }
  const double mean = pairs ? sum / static_cast<double>(pairs) : 0.0;
  return std::max(mean, 1.0) / 255.0;
}

DataTerms histogram_data_terms(const Raster& img, const LabelRaster& seeds, int hist_bins) {
  if (seeds.width() != img.width() || seeds.height() != img.height()) {
    throw Error(ErrorCode::DimensionMismatch, "seed raster does not match image dimensions");
  }
  if (hist_bins < 1 || hist_bins > 256) throw Error(ErrorCode::InvalidArgument, "hist_bins must be in [1,256]");
  const int channels = img.channels();
  const std::size_t n = img.pixel_count();
  const auto px = img.data();
  auto bin_of = [&](std::uint8_t v) { return static_cast<std::size_t>(v) * static_cast<std::size_t>(hist_bins) / 256; };

  // hist[class][channel][bin]
  std::vector<double> hist(2 * static_cast<std::size_t>(channels) * hist_bins, 0.0);
  double totals[2] = {0.0, 0.0};
  auto slot = [&](int cls, int c, std::size_t b) -> double& {
    return hist[(static_cast<std::size_t>(cls) * channels + c) * hist_bins + b];
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (seeds[i] == SeedLabel::Unknown) continue;
    const int cls = seeds[i] == SeedLabel::Foreground ? 0 : 1;
    totals[cls] += 1.0;
    for (int c = 0; c < channels; ++c) slot(cls, c, bin_of(px[i * channels + c])) += 1.0;
  }

  DataTerms out{img.width(), img.height(), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double p[2] = {1.0, 1.0};
    for (int cls = 0; cls < 2; ++cls) {
      for (int c = 0; c < channels; ++c) {
        p[cls] *= (slot(cls, c, bin_of(px[i * channels + c])) + 1.0) / (totals[cls] + hist_bins);
      }
    }
    out.cost_fg[i] = -std::log(p[0] + 1e-8);
    out.cost_bg[i] = -std::log(p[1] + 1e-8);
  }
  return out;
}

BoundaryTerms boundary_terms(const Raster& img, const GraphCutParams& params) {
  if (!(params.lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  const double sigma = params.sigma_b.value_or(default_sigma_b(img));
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_b must be > 0");
  const Raster gray = to_gray(img);
  const int w = gray.width();
  const int h = gray.height();
  BoundaryTerms out{std::vector<double>(gray.pixel_count(), 0.0), std::vector<double>(gray.pixel_count(), 0.0)};
  const double denom = 2.0 * sigma * sigma;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double v = gray.at(x, y) / 255.0;
      if (x + 1 < w) {
        const double d = gray.at(x + 1, y) / 255.0 - v;
        out.right[i] = params.lambda * std::exp(-(d * d) / denom);
      }
      if (y + 1 < h) {
        const double d = gray.at(x, y + 1) / 255.0 - v;
        out.down[i] = params.lambda * std::exp(-(d * d) / denom);
      }
    }
  }
  return out;
}

BinaryMask minimize_energy(const DataTerms& data, const BoundaryTerms& boundary, const LabelRaster& hard) {
  const int w = data.width;
  const int h = data.height;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (hard.width() != w || hard.height() != h || data.cost_fg.size() != n || boundary.right.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "energy terms disagree on dimensions");
  }

  // Per-pixel shift so both t-link capacities are nonnegative; a constant
  // per pixel does not change the minimizer.
  std::vector<double> to_source(n), to_sink(n);
  double finite_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double base = std::min(data.cost_fg[i], data.cost_bg[i]);
    // Labeled foreground (source side) pays the cut sink arc.
    to_sink[i] = data.cost_fg[i] - base;
    to_source[i] = data.cost_bg[i] - base;
    if (hard[i] == SeedLabel::Unknown) finite_total += to_sink[i] + to_source[i];
    finite_total += boundary.right[i] + boundary.down[i];
  }
  const double hard_capacity = 1.0 + finite_total;

  FlowNetwork net(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int node = static_cast<int>(i);
    switch (hard[i]) {
      case SeedLabel::Foreground: net.add_terminal(node, hard_capacity, 0.0); break;
      case SeedLabel::Background: net.add_terminal(node, 0.0, hard_capacity); break;
      case SeedLabel::Unknown: net.add_terminal(node, to_source[i], to_sink[i]); break;
    }
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    if (x + 1 < w && boundary.right[i] > 0.0) net.add_edge(node, node + 1, boundary.right[i], boundary.right[i]);
    if (y + 1 < h && boundary.down[i] > 0.0) net.add_edge(node, node + w, boundary.down[i], boundary.down[i]);
  }
  const auto result = max_flow(std::move(net));
  BinaryMask mask(w, h);
  for (std::size_t i = 0; i < n; ++i) mask.set(i, result.source_side[i] != 0);
  return mask;
}

BinaryMask graph_cut_segment(const Raster& img, const LabelRaster& seeds, const GraphCutParams& params) {
  if (!seeds.has_foreground() || !seeds.has_background()) {
    throw Error(ErrorCode::MissingSeedClass, "graph cut needs both foreground and background seeds");
  }
  const DataTerms data = histogram_data_terms(img, seeds, params.hist_bins);
  return minimize_energy(data, boundary_terms(img, params), seeds);
}

}  // namespace segbench::opt
