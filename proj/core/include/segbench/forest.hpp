#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench::ml {

/// Per-pixel feature planes. Default order:
/// gray, R, G, B, gradient_magnitude, local_mean_r3, local_std_r3, x_norm, y_norm.
struct FeatureStack {
  int width = 0;
  int height = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> planes;

  std::size_t feature_count() const noexcept { return planes.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double value(std::size_t feature, std::size_t pixel) const { return planes[feature][pixel]; }
  void row(std::size_t pixel, std::vector<double>& out) const;
};

struct FeatureOptions {
  bool spatial = true;   // include x_norm / y_norm
  int window_radius = 3; // local mean/std window is (2r+1)^2
};

/// Gray inputs replicate gray into R, G, B. Local statistics are taken on
/// the gray view with clamp-to-edge borders; gradient magnitude is the Sobel
/// magnitude of the gray view.
FeatureStack extract_features(const Raster& img, const FeatureOptions& options = {});

/// Row-major samples, `feature_count` values per row; label 1 = foreground.
struct TrainingSet {
  std::size_t feature_count = 0;
  std::vector<double> rows;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  const double* row(std::size_t i) const { return rows.data() + i * feature_count; }
};

/// Exactly the seeded pixels, in row-major order.
TrainingSet training_set_from_seeds(const FeatureStack& stack, const LabelRaster& seeds);

/// Appends up to `per_class` pixels of each class of `gt`, drawn without
/// replacement with the given seed.
void append_mask_samples(TrainingSet& set, const FeatureStack& stack, const BinaryMask& gt, std::size_t per_class,
                         std::uint64_t seed);

struct ForestParams {
  int n_trees = 50;
  int max_depth = 12;
  int min_samples_leaf = 5;
  int features_per_split = 0;  // 0 selects ceil(sqrt(F))
  std::uint64_t rng_seed = 0;
  bool bootstrap = true;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double probability = 0.0;  // foreground probability at a leaf

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Samples go left when value <= threshold.
  double predict(const double* row) const;
  int depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct Forest {
  ForestParams params;
  std::vector<std::string> feature_names;
  std::vector<DecisionTree> trees;

  /// Mean of the trees' leaf probabilities.
  double predict(const double* row) const;
  friend bool operator==(const Forest&, const Forest&) = default;
};

/// Gini-impurity CART trees on bootstrap samples. Tree i draws from
/// rng_seed + i, so training is deterministic for a fixed seed.
Forest train_forest(const TrainingSet& set, const std::vector<std::string>& feature_names, const ForestParams& params);

/// Trains on the seeded pixels; requires both classes (InsufficientLabels).
Forest train_forest(const FeatureStack& stack, const LabelRaster& seeds, const ForestParams& params);

struct Prediction {
  FloatPlane probability;
  BinaryMask mask;  // probability >= 0.5
};

Prediction predict_forest(const Forest& forest, const FeatureStack& stack);

std::string forest_to_json(const Forest& forest);
Forest forest_from_json(const std::string& text);

}  // namespace segbench::ml
