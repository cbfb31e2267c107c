#include "segbench/algorithms.hpp"

#include "json_codec.hpp"
#include "segbench/error.hpp"
#include "segbench/naive.hpp"

namespace segbench {

std::string_view to_string(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::NaiveOtsu: return "naive_otsu";
    case AlgorithmKind::NaiveCanny: return "naive_canny";
    case AlgorithmKind::NaiveRegionGrow: return "naive_regiongrow";
    case AlgorithmKind::MlForest: return "ml_forest";
    case AlgorithmKind::GraphCut: return "graphcut";
    case AlgorithmKind::GrabCut: return "grabcut";
    case AlgorithmKind::External: return "external";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name) noexcept {
  for (auto kind : {AlgorithmKind::NaiveOtsu, AlgorithmKind::NaiveCanny, AlgorithmKind::NaiveRegionGrow,
                    AlgorithmKind::MlForest, AlgorithmKind::GraphCut, AlgorithmKind::GrabCut,
                    AlgorithmKind::External}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

AlgorithmParams parse_algorithm_params(const std::string& json_object) {
  if (json_object.empty()) return {};
  return detail::algorithm_params_from_json(detail::parse_json(json_object));
}

SeedNeed seed_need(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::NaiveRegionGrow: return SeedNeed::Foreground;
    case AlgorithmKind::MlForest:
    case AlgorithmKind::GraphCut:
    case AlgorithmKind::GrabCut: return SeedNeed::Both;
    default: return SeedNeed::None;
  }
}

bool is_seed_driven(AlgorithmKind kind) noexcept {
  return seed_need(kind) != SeedNeed::None;
}

BinaryMask canny_segment(const Raster& img, const AlgorithmParams& params) {
  const auto edges = naive::canny(to_gray(img), params.canny_sigma, params.canny_low, params.canny_high);
  return naive::edges_to_mask(edges, params.closing_iterations);
}

interact::SeededSegmentFn make_seeded_segmenter(AlgorithmKind kind, const AlgorithmParams& params) {
  switch (kind) {
    case AlgorithmKind::NaiveRegionGrow:
      return [tau = params.region_tau](const Raster& img, const LabelRaster& seeds) {
        return naive::region_grow(to_gray(img), seeds, tau);
      };
    case AlgorithmKind::GraphCut:
      return [graph = params.graph](const Raster& img, const LabelRaster& seeds) {
        return opt::graph_cut_segment(img, seeds, graph);
      };
    case AlgorithmKind::GrabCut:
      return [grab = params.grabcut](const Raster& img, const LabelRaster& seeds) {
        return opt::grabcut(img, seeds, grab).mask;
      };
    case AlgorithmKind::MlForest:
      return [forest = params.forest, spatial = params.spatial_features](const Raster& img, const LabelRaster& seeds) {
        const auto stack = ml::extract_features(img, {spatial, 3});
        return ml::predict_forest(ml::train_forest(stack, seeds, forest), stack).mask;
      };
    default:
      throw Error(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " cannot be driven by seeds");
  }
}

interact::AutoSegmentFn make_automatic_segmenter(AlgorithmKind kind, const AlgorithmParams& params) {
  switch (kind) {
    case AlgorithmKind::NaiveOtsu:
      return [](const Raster& img) { return naive::otsu_segment(img); };
    case AlgorithmKind::NaiveCanny:
      return [params](const Raster& img) { return canny_segment(img, params); };
    default:
      throw Error(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " has no unaided entry point");
  }
}

}  // namespace segbench
