#include <doctest.h>

#include <cmath>
#include <random>

#include "segbench/error.hpp"
#include "segbench/graphcut.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace segbench;
using namespace segbench::opt;

TEST_CASE("bi-constant image splits into halves") {
  const Raster img = testing::halves(32, 16, 30, 220);
  LabelRaster seeds(32, 16);
  seeds.set(24, 8, SeedLabel::Foreground);
  seeds.set(6, 8, SeedLabel::Background);
  const BinaryMask m = graph_cut_segment(img, seeds);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 32; ++x) CHECK(m.at(x, y) == (x >= 16 ? 1 : 0));
}

TEST_CASE("seeds everywhere are reproduced exactly") {
  std::mt19937_64 rng(4);
  const Raster img = testing::random_gray(8, 8, rng);
  LabelRaster seeds(8, 8);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds.set(i, coin(rng) ? SeedLabel::Foreground : SeedLabel::Background);
  seeds.set(0, SeedLabel::Foreground);
  seeds.set(1, SeedLabel::Background);
  const BinaryMask m = graph_cut_segment(img, seeds);
  CHECK(oracle::respects(m, seeds));
}

TEST_CASE("missing seed class") {
  const Raster img = testing::constant_gray(4, 4, 10);
  LabelRaster seeds(4, 4);
  seeds.set(0, SeedLabel::Foreground);
  try {
    graph_cut_segment(img, seeds);
    FAIL("expected MissingSeedClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingSeedClass);
  }
}

TEST_CASE("data and boundary terms match their definitions") {
  std::mt19937_64 rng(5);
  for (int channels : {1, 3}) {
    Raster img(7, 5, channels);
    std::uniform_int_distribution<int> v(0, 255);
    for (auto& b : img.data()) b = static_cast<std::uint8_t>(v(rng));
    const LabelRaster seeds = oracle::random_seeds(7, 5, rng, 0.3);
    GraphCutParams params;
    params.lambda = 3.5;
    params.hist_bins = 8;
    const double sigma = oracle::oracle_sigma_b(img);
    CHECK(default_sigma_b(img) == doctest::Approx(sigma).epsilon(1e-12));
    const oracle::EnergyOracle oracle(img, seeds, params.lambda, sigma, params.hist_bins);
    const DataTerms d = histogram_data_terms(img, seeds, params.hist_bins);
    const BoundaryTerms b = boundary_terms(img, params);
    for (std::size_t p = 0; p < oracle.d_fg.size(); ++p) {
      CHECK(d.cost_fg[p] == doctest::Approx(oracle.d_fg[p]).epsilon(1e-12));
      CHECK(d.cost_bg[p] == doctest::Approx(oracle.d_bg[p]).epsilon(1e-12));
      CHECK(b.right[p] == doctest::Approx(oracle.right[p]).epsilon(1e-12));
      CHECK(b.down[p] == doctest::Approx(oracle.down[p]).epsilon(1e-12));
    }
  }
}

TEST_CASE("3x3 labelings reach the exhaustive energy minimum") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const Raster img = testing::random_gray(3, 3, rng);
    const LabelRaster seeds = oracle::random_seeds(3, 3, rng, 0.2);
    GraphCutParams params;
    params.lambda = trial < 10 ? 50.0 : 0.5 * trial;
    params.hist_bins = 4 + trial % 29;
    const oracle::EnergyOracle oracle(img, seeds, params.lambda, oracle::oracle_sigma_b(img), params.hist_bins);
    double best = INFINITY;
    for (unsigned bits = 0; bits < 512; ++bits) {
      std::vector<int> l(9);
      bool ok = true;
      for (std::size_t i = 0; i < 9; ++i) {
        l[i] = (bits >> i) & 1u;
        if ((seeds[i] == SeedLabel::Foreground && !l[i]) || (seeds[i] == SeedLabel::Background && l[i])) ok = false;
      }
      if (ok) best = std::min(best, oracle.energy(l));
    }
    const BinaryMask m = graph_cut_segment(img, seeds, params);
    CAPTURE(trial);
    CHECK(oracle::respects(m, seeds));
    CHECK(oracle.energy(m) == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("seed constraints and the lower envelope hold on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 4 + trial % 13, h = 3 + trial % 7;
    Raster img(w, h, trial % 2 ? 3 : 1);
    std::uniform_int_distribution<int> v(0, 255);
    for (auto& b : img.data()) b = static_cast<std::uint8_t>(v(rng));
    const LabelRaster seeds = oracle::random_seeds(w, h, rng, 0.15);
    GraphCutParams params;
    params.lambda = 10.0 * (trial % 6);
    const BinaryMask m = graph_cut_segment(img, seeds, params);
    CAPTURE(trial);
    REQUIRE(oracle::respects(m, seeds));
    const oracle::EnergyOracle oracle(img, seeds, params.lambda, oracle::oracle_sigma_b(img), params.hist_bins);
    BinaryMask all_fg(w, h), all_bg(w, h);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      all_fg.set(i, seeds[i] != SeedLabel::Background);
      all_bg.set(i, seeds[i] == SeedLabel::Foreground);
    }
    const double e = oracle.energy(m);
    CHECK(e <= oracle.energy(all_fg) + 1e-9 * std::abs(e));
    CHECK(e <= oracle.energy(all_bg) + 1e-9 * std::abs(e));
  }
}

TEST_CASE("explicit sigma_b and zero lambda") {
  const Raster img = testing::halves(8, 4, 100, 101);
  GraphCutParams params;
  params.sigma_b = 0.5;
  params.lambda = 2.0;
  const BoundaryTerms b = boundary_terms(img, params);
  const double d = 1.0 / 255.0;
  CHECK(b.right[3] == doctest::Approx(2.0 * std::exp(-d * d / 0.5)));
  CHECK(b.right[7] == 0.0);
  CHECK(b.down[24] == 0.0);
  params.lambda = 0.0;
  for (double v : boundary_terms(img, params).right) CHECK(v == 0.0);
  params.sigma_b = 0.0;
  CHECK_THROWS_AS(boundary_terms(img, params), Error);
}
