#include "segbench/grabcut.hpp"

#include <algorithm>

#include "segbench/error.hpp"
#include "segbench/gmm.hpp"

namespace segbench::opt {
namespace {

bool is_foreground(Trimap t) { return t == Trimap::HardForeground || t == Trimap::ProbableForeground; }

Gmm fit_class(const std::vector<Rgb>& pixels, const GrabCutParams& params, std::uint64_t seed) {
  // Fall back to fewer components when a side is too small.
  const int k = std::max(1, std::min(params.components, static_cast<int>(pixels.size())));
  return fit_gmm(pixels, k, params.em_iterations, seed).model;
}

}  // namespace

GrabCutResult grabcut(const Raster& img, std::vector<Trimap> trimap, const GrabCutParams& params) {
  const std::size_t n = img.pixel_count();
  if (trimap.size() != n) throw Error(ErrorCode::DimensionMismatch, "trimap does not match image");
  if (params.max_rounds < 1) throw Error(ErrorCode::InvalidArgument, "max_rounds must be >= 1");

  const Raster rgb = to_rgb(img);
  std::vector<Rgb> colors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) colors[i][c] = rgb.data()[3 * i + c] / 255.0;
  }

  LabelRaster hard(img.width(), img.height());
  for (std::size_t i = 0; i < n; ++i) {
    if (trimap[i] == Trimap::HardForeground) hard.set(i, SeedLabel::Foreground);
    if (trimap[i] == Trimap::HardBackground) hard.set(i, SeedLabel::Background);
  }
  const BoundaryTerms boundary = boundary_terms(img, params.graph);

  GrabCutResult result;
  result.mask = BinaryMask(img.width(), img.height());
  for (std::size_t i = 0; i < n; ++i) result.mask.set(i, is_foreground(trimap[i]));

  for (int round = 0; round < params.max_rounds; ++round) {
    std::vector<Rgb> fg, bg;
    for (std::size_t i = 0; i < n; ++i) (result.mask[i] ? fg : bg).push_back(colors[i]);
    if (fg.empty() || bg.empty()) {
      if (round == 0) throw Error(ErrorCode::DegenerateInit, "GrabCut initialization leaves a side empty");
      // A collapsed side has no model left to refit; the labeling is final.
      result.converged = true;
      break;
    }
    const Gmm fg_model = fit_class(fg, params, params.rng_seed);
    const Gmm bg_model = fit_class(bg, params, params.rng_seed + 1);

    DataTerms data{img.width(), img.height(), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      data.cost_fg[i] = gmm_neg_loglik(fg_model, colors[i]);
      data.cost_bg[i] = gmm_neg_loglik(bg_model, colors[i]);
    }
    BinaryMask next = minimize_energy(data, boundary, hard);
    ++result.rounds;
    if (next == result.mask) {
      result.converged = true;
      break;
    }
    result.mask = std::move(next);
  }
  return result;
}

GrabCutResult grabcut(const Raster& img, const Rect& rect, const GrabCutParams& params) {
  const int x0 = std::max(rect.x, 0);
  const int y0 = std::max(rect.y, 0);
  const int x1 = std::min(rect.x + rect.width, img.width());
  const int y1 = std::min(rect.y + rect.height, img.height());
  if (rect.x < 0 || rect.y < 0 || x1 != rect.x + rect.width || y1 != rect.y + rect.height) {
    throw Error(ErrorCode::DegenerateInit, "rectangle extends outside the image");
  }
  if (x1 <= x0 || y1 <= y0) throw Error(ErrorCode::DegenerateInit, "rectangle interior is empty");
  if (x0 == 0 && y0 == 0 && x1 == img.width() && y1 == img.height()) {
    throw Error(ErrorCode::DegenerateInit, "rectangle leaves no exterior");
  }
  std::vector<Trimap> trimap(img.pixel_count(), Trimap::HardBackground);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) trimap[static_cast<std::size_t>(y) * img.width() + x] = Trimap::ProbableForeground;
  }
  return grabcut(img, std::move(trimap), params);
}

GrabCutResult grabcut(const Raster& img, const LabelRaster& seeds, const GrabCutParams& params) {
  if (seeds.width() != img.width() || seeds.height() != img.height()) {
    throw Error(ErrorCode::DimensionMismatch, "seed raster does not match image dimensions");
  }
  if (!seeds.has_foreground() || !seeds.has_background()) {
    throw Error(ErrorCode::DegenerateInit, "GrabCut from seeds needs both foreground and background seeds");
  }
  std::vector<Trimap> trimap(img.pixel_count(), Trimap::ProbableBackground);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] == SeedLabel::Foreground) trimap[i] = Trimap::HardForeground;
    if (seeds[i] == SeedLabel::Background) trimap[i] = Trimap::HardBackground;
  }
  return grabcut(img, std::move(trimap), params);
}

}  // namespace segbench::opt
