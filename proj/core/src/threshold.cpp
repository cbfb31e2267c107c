#include <string>

#include "segbench/error.hpp"
#include "segbench/naive.hpp"

namespace segbench::naive {
namespace {

void require_gray(const Raster& img) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::NotGrayscale, "expected 1 channel, got " + std::to_string(img.channels()));
  }
}

}  // namespace

std::uint64_t Histogram256::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

Histogram256 histogram(const Raster& gray) {
  require_gray(gray);
  Histogram256 h;
  for (auto v : gray.data()) ++h.counts[v];
  return h;
}

int otsu_threshold(const Histogram256& hist) {
  const std::uint64_t total = hist.total();
  if (total == 0) throw Error(ErrorCode::EmptyHistogram, "histogram has no samples");

  std::uint64_t weighted_total = 0;
  for (int v = 0; v < 256; ++v) weighted_total += hist.counts[v] * static_cast<std::uint64_t>(v);

  const double n = static_cast<double>(total);
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  int best_t = 0;
  double best = 0.0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist.counts[t];
    s0 += hist.counts[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
    const double mu1 = static_cast<double>(weighted_total - s0) / static_cast<double>(n1);
    const double w0 = static_cast<double>(n0) / n;
    const double w1 = static_cast<double>(n1) / n;
    const double score = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

BinaryMask threshold_segment(const Raster& gray, int t) {
  require_gray(gray);
  BinaryMask mask(gray.width(), gray.height());
  auto px = gray.data();
  for (std::size_t i = 0; i < px.size(); ++i) mask.set(i, static_cast<int>(px[i]) > t);
  return mask;
}

BinaryMask otsu_segment(const Raster& img) {
  const Raster gray = to_gray(img);
  return threshold_segment(gray, otsu_threshold(histogram(gray)));
}

}  // namespace segbench::naive
