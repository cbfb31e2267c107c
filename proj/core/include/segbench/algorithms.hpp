#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "segbench/forest.hpp"
#include "segbench/grabcut.hpp"
#include "segbench/graphcut.hpp"
#include "segbench/interaction.hpp"

namespace segbench {

enum class AlgorithmKind { NaiveOtsu, NaiveCanny, NaiveRegionGrow, MlForest, GraphCut, GrabCut, External };

std::string_view to_string(AlgorithmKind kind) noexcept;
/// Accepts naive_otsu, naive_canny, naive_regiongrow, ml_forest, graphcut,
/// grabcut, external.
std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name) noexcept;

struct AlgorithmParams {
  double canny_sigma = 1.4;
  double canny_low = 50.0;
  double canny_high = 150.0;
  int closing_iterations = 2;

  double region_tau = 25.0;

  ml::ForestParams forest;
  bool spatial_features = true;
  std::size_t batch_pixels_per_class = 2000;

  opt::GraphCutParams graph;
  opt::GrabCutParams grabcut;

  std::string manifest;  // external provider manifest path
};

/// Parses a JSON object of overrides on top of the defaults. Unknown keys
/// are rejected with ConfigError.
AlgorithmParams parse_algorithm_params(const std::string& json_object);

enum class SeedNeed { None, Foreground, Both };

/// What a kind needs from the user before it can produce a mask.
SeedNeed seed_need(AlgorithmKind kind) noexcept;

/// True for kinds that are natively driven by seeds (region growing, graph
/// cut, GrabCut, forest trained on seeds).
bool is_seed_driven(AlgorithmKind kind) noexcept;

/// Seed-driven entry point. Throws InvalidArgument for kinds without one.
interact::SeededSegmentFn make_seeded_segmenter(AlgorithmKind kind, const AlgorithmParams& params);

/// Unaided entry point for Otsu and Canny. Forest and external kinds need
/// training data or mask files and are assembled by the harness.
interact::AutoSegmentFn make_automatic_segmenter(AlgorithmKind kind, const AlgorithmParams& params);

BinaryMask canny_segment(const Raster& img, const AlgorithmParams& params);

}  // namespace segbench
