#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "segbench/error.hpp"
#include "segbench/forest.hpp"
#include "json_codec.hpp"

namespace segbench::ml {
namespace {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingSet& set, const ForestParams& params, int features_per_split, std::mt19937_64& rng)
      : set_(set), params_(params), features_per_split_(features_per_split), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    nodes_ = &tree.nodes;
    grow(samples, 0);
    return tree;
  }

 private:
  int grow(std::vector<std::size_t>& samples, int depth) {
    const std::size_t n = samples.size();
    std::size_t n_fg = 0;
    for (auto s : samples) n_fg += set_.labels[s];

    const int index = static_cast<int>(nodes_->size());
    nodes_->push_back(TreeNode{});
    (*nodes_)[index].probability = n == 0 ? 0.0 : static_cast<double>(n_fg) / static_cast<double>(n);

    const bool pure = n_fg == 0 || n_fg == n;
    if (pure || depth >= params_.max_depth || n < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
      return index;
    }
    const SplitCandidate split = best_split(samples);
    if (split.feature < 0) return index;

    std::vector<std::size_t> left, right;
    for (auto s : samples) {
      (set_.row(s)[split.feature] <= split.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    (*nodes_)[index].feature = split.feature;
    (*nodes_)[index].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    (*nodes_)[index].left = l;
    (*nodes_)[index].right = r;
    return index;
  }

  SplitCandidate best_split(const std::vector<std::size_t>& samples) {
    const std::size_t F = set_.feature_count;
    std::vector<int> features(F);
    std::iota(features.begin(), features.end(), 0);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(features_per_split_), F);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, F - 1);
      std::swap(features[i], features[pick(rng_)]);
    }

    const std::size_t n = samples.size();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(params_.min_samples_leaf, 1));
    std::size_t total_fg = 0;
    for (auto s : samples) total_fg += set_.labels[s];

    SplitCandidate best;
    double best_impurity = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::uint8_t>> column(n);
    for (std::size_t fi = 0; fi < k; ++fi) {
      const int f = features[fi];
      for (std::size_t i = 0; i < n; ++i) column[i] = {set_.row(samples[i])[f], set_.labels[samples[i]]};
      std::sort(column.begin(), column.end());
      std::size_t left_fg = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_fg += column[i].second;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (!(column[i].first < column[i + 1].first)) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double pl = static_cast<double>(left_fg) / static_cast<double>(nl);
        const double pr = static_cast<double>(total_fg - left_fg) / static_cast<double>(nr);
        const double impurity = (static_cast<double>(nl) * 2.0 * pl * (1.0 - pl) +
                                 static_cast<double>(nr) * 2.0 * pr * (1.0 - pr)) /
                                static_cast<double>(n);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          double mid = 0.5 * (column[i].first + column[i + 1].first);
          if (!(mid < column[i + 1].first)) mid = column[i].first;
          best = {f, mid, impurity};
        }
      }
    }
    return best;
  }

  const TrainingSet& set_;
  const ForestParams& params_;
  int features_per_split_;
  std::mt19937_64& rng_;
  std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace

double DecisionTree::predict(const double* row) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& node = nodes[static_cast<std::size_t>(i)];
    i = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(i)].probability;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes[static_cast<std::size_t>(i)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

double Forest::predict(const double* row) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(row);
  return sum / static_cast<double>(trees.size());
}

Forest train_forest(const TrainingSet& set, const std::vector<std::string>& feature_names, const ForestParams& params) {
  if (params.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be >= 1");
  if (params.max_depth < 0) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 0");
  if (set.feature_count != feature_names.size()) {
    throw Error(ErrorCode::FeatureMismatch, "feature names do not match the training set width");
  }
  std::size_t n_fg = 0;
  for (auto l : set.labels) n_fg += l;
  if (n_fg == 0 || n_fg == set.size()) {
    throw Error(ErrorCode::InsufficientLabels, "training needs at least one foreground and one background sample");
  }

  const int per_split = params.features_per_split > 0
                            ? params.features_per_split
                            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(set.feature_count))));

  Forest forest;
  forest.params = params;
  forest.feature_names = feature_names;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    std::mt19937_64 rng(params.rng_seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> samples(set.size());
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
      for (auto& s : samples) s = pick(rng);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    TreeBuilder builder(set, params, per_split, rng);
    forest.trees.push_back(builder.build(std::move(samples)));
  }
  return forest;
}

Forest train_forest(const FeatureStack& stack, const LabelRaster& seeds, const ForestParams& params) {
  if (!seeds.has_foreground() || !seeds.has_background()) {
    throw Error(ErrorCode::InsufficientLabels, "forest training needs foreground and background seeds");
  }
  return train_forest(training_set_from_seeds(stack, seeds), stack.names, params);
}

Prediction predict_forest(const Forest& forest, const FeatureStack& stack) {
  if (forest.trees.empty()) throw Error(ErrorCode::InvalidArgument, "forest has no trees");
  if (forest.feature_names != stack.names) {
    throw Error(ErrorCode::FeatureMismatch, "feature stack does not match the forest's training features");
  }
  Prediction out{FloatPlane(stack.width, stack.height), BinaryMask(stack.width, stack.height)};
  std::vector<double> row;
  for (std::size_t i = 0; i < stack.pixel_count(); ++i) {
    stack.row(i, row);
    const double p = forest.predict(row.data());
    out.probability.values[i] = p;
    out.mask.set(i, p >= 0.5);
  }
  return out;
}

std::string forest_to_json(const Forest& forest) {
  return detail::to_json(forest).dump();
}

Forest forest_from_json(const std::string& text) {
  return detail::forest_from_json(detail::parse_json(text));
}

}  // namespace segbench::ml
