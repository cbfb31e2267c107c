#pragma once

#include <optional>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench::opt {

/// Energy E(L) = sum_p D_p(L_p) + lambda * sum_{p~q} B_pq [L_p != L_q] over
/// 4-connected neighbors, with B_pq = exp(-(dI)^2 / (2 sigma_b^2)) on gray
/// intensities normalized to [0, 1].
struct GraphCutParams {
  double lambda = 50.0;
  /// In normalized intensity units. Unset selects default_sigma_b().
  std::optional<double> sigma_b;
  int hist_bins = 32;
};

/// Mean absolute 4-neighbor gray difference in 8-bit units, floored at 1,
/// returned in normalized units (divided by 255).
double default_sigma_b(const Raster& img);

/// Per-pixel label costs: cost_fg[p] = D_p(foreground), cost_bg[p] = D_p(background).
struct DataTerms {
  int width = 0;
  int height = 0;
  std::vector<double> cost_fg;
  std::vector<double> cost_bg;
};

/// D_p(l) = -log(P(I_p | l) + 1e-8) where P is the product over channels of
/// add-one smoothed per-channel histograms (hist_bins bins) built from the
/// seed pixels of class l.
DataTerms histogram_data_terms(const Raster& img, const LabelRaster& seeds, int hist_bins);

/// Boundary weights for right (x+1) and down (y+1) neighbors, already
/// multiplied by lambda. Entries past the last column/row are zero.
struct BoundaryTerms {
  std::vector<double> right;
  std::vector<double> down;
};
BoundaryTerms boundary_terms(const Raster& img, const GraphCutParams& params);

/// Minimizes data + boundary energy with `hard` pixels clamped to their
/// label through a finite capacity larger than any achievable cut.
BinaryMask minimize_energy(const DataTerms& data, const BoundaryTerms& boundary, const LabelRaster& hard);

/// Seeded graph cut: histogram data terms from the seeds, seeds as hard
/// constraints. Throws MissingSeedClass unless both classes are seeded.
BinaryMask graph_cut_segment(const Raster& img, const LabelRaster& seeds, const GraphCutParams& params = {});

}  // namespace segbench::opt
