#pragma once

#include <cstdint>
#include <vector>

#include "segbench/graphcut.hpp"
#include "segbench/raster.hpp"

namespace segbench::opt {

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

enum class Trimap : std::uint8_t { HardBackground, HardForeground, ProbableForeground, ProbableBackground };

struct GrabCutParams {
  int components = 5;
  GraphCutParams graph;
  int max_rounds = 5;
  int em_iterations = 20;
  std::uint64_t rng_seed = 0;
};

struct GrabCutResult {
  BinaryMask mask;
  int rounds = 0;
  bool converged = false;  // the last round reproduced the previous mask
};

/// Iterated GMM fitting + graph cut. Only probable pixels may change label.
GrabCutResult grabcut(const Raster& img, std::vector<Trimap> trimap, const GrabCutParams& params = {});

/// Rectangle initialization: interior probable foreground, exterior hard
/// background. Throws DegenerateInit for an empty interior or exterior.
GrabCutResult grabcut(const Raster& img, const Rect& rect, const GrabCutParams& params = {});

/// Seed initialization: seeds are hard labels, unseeded pixels start as
/// probable background. Needs both seed classes (DegenerateInit).
GrabCutResult grabcut(const Raster& img, const LabelRaster& seeds, const GrabCutParams& params = {});

}  // namespace segbench::opt
