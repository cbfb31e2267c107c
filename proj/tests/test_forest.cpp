#include <doctest.h>

#include <cmath>

#include "segbench/error.hpp"
#include "segbench/forest.hpp"
#include "segbench/metrics.hpp"
#include "support.hpp"

using namespace segbench;
using namespace segbench::ml;

namespace {

TrainingSet gray_threshold_set(std::mt19937_64& rng, int per_class) {
  TrainingSet set;
  set.feature_count = 3;
  std::uniform_int_distribution<int> bg(0, 128), fg(129, 255), noise(0, 255);
  for (int cls = 0; cls < 2; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      set.rows.push_back(cls ? fg(rng) : bg(rng));
      set.rows.push_back(noise(rng));
      set.rows.push_back(noise(rng));
      set.labels.push_back(static_cast<std::uint8_t>(cls));
    }
  }
  return set;
}

double training_accuracy(const Forest& f, const TrainingSet& set) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) correct += (f.predict(set.row(i)) >= 0.5) == (set.labels[i] == 1);
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

const std::vector<std::string> kThree{"gray", "noise_a", "noise_b"};

}  // namespace

TEST_CASE("feature extraction") {
  const Raster flat = testing::constant_gray(9, 6, 100);
  const FeatureStack s = extract_features(flat);
  REQUIRE(s.feature_count() == 9u);
  CHECK(s.names == std::vector<std::string>{"gray", "R", "G", "B", "gradient_magnitude", "local_mean_r3",
                                            "local_std_r3", "x_norm", "y_norm"});
  for (std::size_t p = 0; p < s.pixel_count(); ++p) {
    CHECK(s.value(4, p) == 0.0);
    CHECK(s.value(6, p) == doctest::Approx(0.0));
    CHECK(s.value(5, p) == doctest::Approx(100.0));
    for (std::size_t f = 0; f < 4; ++f) CHECK(s.value(f, p) == s.value(0, p));
  }
  for (int y = 0; y < 6; ++y) {
    CHECK(s.value(7, static_cast<std::size_t>(y) * 9) == 0.0);
    CHECK(s.value(7, static_cast<std::size_t>(y) * 9 + 8) == 1.0);
  }
  const FeatureStack seven = extract_features(testing::constant_gray(7, 7, 100));
  CHECK(seven.value(5, 24) == doctest::Approx(100.0));

  std::mt19937_64 rng(1);
  const FeatureStack noisy = extract_features(testing::random_gray(16, 12, rng));
  for (const auto& plane : noisy.planes)
    for (double v : plane) CHECK(std::isfinite(v));
  for (std::size_t p = 0; p < noisy.pixel_count(); ++p) {
    CHECK(noisy.value(7, p) >= 0.0);
    CHECK(noisy.value(7, p) <= 1.0);
    CHECK(noisy.value(8, p) >= 0.0);
    CHECK(noisy.value(8, p) <= 1.0);
  }
  CHECK(extract_features(flat, {false, 3}).feature_count() == 7u);
}

TEST_CASE("forest fits a gray threshold exactly at depth 3") {
  std::mt19937_64 rng(7);
  const TrainingSet set = gray_threshold_set(rng, 200);
  ForestParams params;
  params.max_depth = 3;
  params.rng_seed = 99;
  const Forest f = train_forest(set, kThree, params);
  CHECK(f.trees.size() == 50u);
  CHECK(training_accuracy(f, set) == 1.0);
  for (const auto& t : f.trees) CHECK(t.depth() <= 3);
}

TEST_CASE("indistinguishable classes give probability 0.5") {
  TrainingSet set;
  set.feature_count = 1;
  for (int i = 0; i < 10; ++i) {
    set.rows.push_back(42.0);
    set.labels.push_back(static_cast<std::uint8_t>(i % 2));
  }
  ForestParams params;
  params.n_trees = 5;
  params.bootstrap = false;
  const Forest f = train_forest(set, {"gray"}, params);
  const double row = 42.0;
  CHECK(f.predict(&row) == 0.5);
  for (const auto& t : f.trees) {
    REQUIRE(t.nodes.size() == 1u);
    CHECK(t.nodes[0].probability == 0.5);
  }
}

TEST_CASE("training is deterministic and serializes losslessly") {
  std::mt19937_64 rng(8);
  const TrainingSet set = gray_threshold_set(rng, 80);
  ForestParams params;
  params.n_trees = 10;
  params.rng_seed = 5;
  const Forest a = train_forest(set, kThree, params);
  const Forest b = train_forest(set, kThree, params);
  CHECK(a == b);
  CHECK(forest_from_json(forest_to_json(a)) == a);
  params.rng_seed = 6;
  CHECK_FALSE(train_forest(set, kThree, params) == a);
  CHECK_THROWS_AS(forest_from_json("{\"trees\":[]}"), Error);
}

TEST_CASE("forest structure invariants") {
  std::mt19937_64 rng(9);
  const TrainingSet set = gray_threshold_set(rng, 60);
  ForestParams params;
  params.n_trees = 8;
  params.max_depth = 4;
  const Forest f = train_forest(set, kThree, params);
  for (const auto& tree : f.trees) {
    CHECK(tree.depth() <= params.max_depth);
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) {
        CHECK(n.probability >= 0.0);
        CHECK(n.probability <= 1.0);
      } else {
        CHECK(n.left > 0);
        CHECK(n.right > 0);
        CHECK(static_cast<std::size_t>(n.left) < tree.nodes.size());
        CHECK(static_cast<std::size_t>(n.right) < tree.nodes.size());
      }
    }
  }
}

TEST_CASE("each tree fits its sample at least as well as a root majority vote") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    TrainingSet set;
    set.feature_count = 2;
    std::normal_distribution<double> n(0.0, 1.0);
    std::bernoulli_distribution coin(0.3 + 0.1 * trial);
    for (int i = 0; i < 120; ++i) {
      const bool fg = coin(rng);
      set.rows.push_back(n(rng) + (fg ? 1.0 : 0.0));
      set.rows.push_back(n(rng));
      set.labels.push_back(fg);
    }
    ForestParams params;
    params.n_trees = 6;
    params.bootstrap = false;
    params.rng_seed = static_cast<std::uint64_t>(trial);
    const Forest f = train_forest(set, {"a", "b"}, params);
    std::size_t fg = 0;
    for (auto l : set.labels) fg += l;
    const double majority = std::max(fg, set.size() - fg) / static_cast<double>(set.size());
    for (const auto& tree : f.trees) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < set.size(); ++i) correct += (tree.predict(set.row(i)) >= 0.5) == (set.labels[i] == 1);
      CHECK(static_cast<double>(correct) / static_cast<double>(set.size()) >= majority);
    }
  }
}

TEST_CASE("unlimited depth separates any distinct training points") {
  std::mt19937_64 rng(11);
  TrainingSet set;
  set.feature_count = 2;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 150; ++i) {
    const double x = u(rng), y = u(rng);
    set.rows.push_back(x);
    set.rows.push_back(y);
    set.labels.push_back((x > 0.5) != (y > 0.5));  // checkerboard
  }
  ForestParams params;
  params.n_trees = 3;
  params.max_depth = 64;
  params.min_samples_leaf = 1;
  params.features_per_split = 2;
  params.bootstrap = false;
  CHECK(training_accuracy(train_forest(set, {"x", "y"}, params), set) == 1.0);
}

TEST_CASE("training from seeds and prediction") {
  const auto spec = testing::fixture_spec("noisy_disk");
  const auto train = bench::make_synthetic_item(spec, 0);
  const auto test = bench::make_synthetic_item(spec, 1);

  SUBCASE("missing class") {
    LabelRaster seeds(64, 64);
    seeds.set(3, 3, SeedLabel::Foreground);
    try {
      train_forest(extract_features(train.image), seeds, {});
      FAIL("expected InsufficientLabels");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientLabels);
    }
  }
  SUBCASE("held-out disk IoU >= 0.9") {
    const FeatureStack train_stack = extract_features(train.image);
    TrainingSet set;
    set.feature_count = train_stack.feature_count();
    append_mask_samples(set, train_stack, train.gt, 2000, 3);
    const Forest f = train_forest(set, train_stack.names, {});
    const Prediction p = predict_forest(f, extract_features(test.image));
    CHECK(metrics::iou(test.gt, p.mask) >= 0.9);
    for (double v : p.probability.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // Probability is the mean of the trees, mask is prob >= 0.5.
    const FeatureStack test_stack = extract_features(test.image);
    std::vector<double> row;
    for (std::size_t pixel : {0u, 2080u, 4095u}) {
      test_stack.row(pixel, row);
      double sum = 0.0;
      for (const auto& t : f.trees) sum += t.predict(row.data());
      CHECK(p.probability.values[pixel] == doctest::Approx(sum / static_cast<double>(f.trees.size())));
      CHECK((p.mask[pixel] == 1) == (p.probability.values[pixel] >= 0.5));
    }
    CHECK_THROWS_AS(predict_forest(f, extract_features(test.image, {false, 3})), Error);
  }
  SUBCASE("a single always-foreground leaf predicts all ones") {
    Forest f;
    f.feature_names = extract_features(test.image).names;
    f.trees.push_back(DecisionTree{{TreeNode{-1, 0.0, -1, -1, 1.0}}});
    CHECK(predict_forest(f, extract_features(test.image)).mask.count() == 4096u);
  }
}
