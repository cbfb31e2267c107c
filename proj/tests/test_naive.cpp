#include <doctest.h>

#include <cmath>
#include <deque>
#include <numbers>

#include "segbench/error.hpp"
#include "segbench/metrics.hpp"
#include "segbench/morphology.hpp"
#include "segbench/naive.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace segbench;
using namespace segbench::naive;

namespace {

Raster dense_blur(const Raster& g, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k2;
  double sum = 0;
  for (int j = -r; j <= r; ++j)
    for (int i = -r; i <= r; ++i) {
      k2.push_back(std::exp(-(i * i + j * j) / (2 * sigma * sigma)));
      sum += k2.back();
    }
  Raster out(g.width(), g.height(), 1);
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      double acc = 0;
      std::size_t idx = 0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i, ++idx) {
          const int sx = std::clamp(x + i, 0, g.width() - 1), sy = std::clamp(y + j, 0, g.height() - 1);
          acc += k2[idx] / sum * g.at(sx, sy);
        }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  return out;
}

/// Pixels reachable from the border through non-wall pixels (8-connected).
std::vector<std::uint8_t> exterior_of(const BinaryMask& walls) {
  const int w = walls.width(), h = walls.height();
  std::vector<std::uint8_t> ext(walls.size(), 0);
  std::deque<int> q;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) && !walls.at(x, y)) {
        ext[y * w + x] = 1;
        q.push_back(y * w + x);
      }
  while (!q.empty()) {
    const int i = q.front();
    q.pop_front();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = i % w + dx, y = i / w + dy;
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        const int j = y * w + x;
        if (!walls[j] && !ext[j]) {
          ext[j] = 1;
          q.push_back(j);
        }
      }
  }
  return ext;
}

EdgeMap square_contour(int size, int x0, int y0, int side) {
  EdgeMap e(size, size);
  for (int k = 0; k < side; ++k) {
    e.set(x0 + k, y0, true);
    e.set(x0 + k, y0 + side - 1, true);
    e.set(x0, y0 + k, true);
    e.set(x0 + side - 1, y0 + k, true);
  }
  return e;
}

LabelRaster one_seed(int w, int h, int x, int y) {
  LabelRaster s(w, h);
  s.set(x, y, SeedLabel::Foreground);
  return s;
}

}  // namespace

TEST_CASE("histogram") {
  CHECK(histogram(testing::constant_gray(2, 2, 0)).counts[0] == 4u);
  const Raster r(4, 1, 1, {0, 0, 1, 255});
  const auto h = histogram(r);
  CHECK(h.counts[0] == 2u);
  CHECK(h.counts[1] == 1u);
  CHECK(h.counts[255] == 1u);
  CHECK(h.total() == 4u);
  CHECK(histogram(load_image(testing::source_dir() / "data" / "disk_64.png")).total() == 4096u);
  CHECK_THROWS_AS(histogram(Raster(2, 2, 3)), Error);
}

TEST_CASE("otsu threshold") {
  SUBCASE("two spikes tie over [10,199]; smallest wins") {
    Histogram256 h;
    h.counts[10] = 50;
    h.counts[200] = 50;
    CHECK(otsu_threshold(h) == 10);
    CHECK(oracle::brute_force_otsu(h) == 10);
  }
  SUBCASE("single value") {
    Histogram256 h;
    h.counts[7] = 30;
    CHECK(otsu_threshold(h) == 0);
  }
  SUBCASE("empty histogram") {
    try {
      otsu_threshold(Histogram256{});
      FAIL("expected EmptyHistogram");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyHistogram);
    }
  }
  SUBCASE("random histograms match the exhaustive argmax") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      Histogram256 h;
      std::uniform_int_distribution<int> count(0, 100), sparse(0, 5);
      const bool is_sparse = trial % 2 == 0;
      for (auto& c : h.counts) c = static_cast<std::uint64_t>(is_sparse ? (sparse(rng) == 0 ? count(rng) : 0) : count(rng));
      if (h.total() == 0) h.counts[trial % 256] = 1;
      CHECK(otsu_threshold(h) == oracle::brute_force_otsu(h));
    }
  }
}

TEST_CASE("threshold segment") {
  std::mt19937_64 rng(4);
  const Raster g = testing::random_gray(9, 9, rng);
  CHECK(threshold_segment(g, 255).count() == 0u);
  const Raster bits(3, 1, 1, {0, 1, 1});
  CHECK(threshold_segment(bits, 0) == BinaryMask(3, 1, std::vector<std::uint8_t>{0, 1, 1}));
  SUBCASE("noisy bimodal disk: otsu IoU >= 0.95") {
    const auto spec = testing::fixture_spec("noisy_disk");
    for (int i = 0; i < spec.n_images; ++i) {
      const auto item = bench::make_synthetic_item(spec, i);
      CHECK(metrics::iou(item.gt, otsu_segment(item.image)) >= 0.95);
    }
  }
}

TEST_CASE("gaussian blur") {
  CHECK_THROWS_AS(gaussian_blur(testing::constant_gray(3, 3, 1), 0.0), Error);
  CHECK(gaussian_blur(testing::constant_gray(12, 7, 93), 1.7) == testing::constant_gray(12, 7, 93));

  SUBCASE("impulse") {
    Raster img = testing::constant_gray(9, 9, 0);
    img.at(4, 4) = 255;
    const Raster out = gaussian_blur(img, 1.0);
    double k0 = 0, total = 0;
    for (int i = -3; i <= 3; ++i) total += std::exp(-i * i / 2.0);
    k0 = 1.0 / total;
    CHECK(out.at(4, 4) == std::lround(255 * k0 * k0));
    int sum = 0;
    for (auto v : out.data()) sum += v;
    CHECK(std::abs(sum - 255) <= 49);
  }
  SUBCASE("separable result matches dense 2-D convolution within 1") {
    std::mt19937_64 rng(8);
    const Raster img = testing::random_gray(23, 17, rng);
    for (double sigma : {0.5, 2.0}) {
      const Raster a = gaussian_blur(img, sigma);
      const Raster b = dense_blur(img, sigma);
      for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(int(a.data()[i]) - int(b.data()[i])) <= 1);
    }
  }
}

TEST_CASE("sobel gradients") {
  const auto flat = sobel_gradients(testing::constant_gray(6, 6, 80));
  for (double m : flat.magnitude.values) CHECK(m == 0.0);

  const Raster vstep = testing::halves(8, 8, 0, 255);
  const auto gv = sobel_gradients(vstep);
  for (int y = 0; y < 8; ++y) {
    for (int x : {3, 4}) {
      CHECK(gv.magnitude.at(x, y) == doctest::Approx(1020.0));
      CHECK(std::abs(std::sin(gv.direction.at(x, y))) < 1e-12);
    }
    CHECK(gv.magnitude.at(1, y) == 0.0);
  }
  Raster hstep(8, 8, 1);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) hstep.at(x, y) = y < 4 ? 0 : 255;
  const auto gh = sobel_gradients(hstep);
  for (int x = 0; x < 8; ++x) {
    CHECK(gh.magnitude.at(x, 3) == doctest::Approx(1020.0));
    CHECK(std::abs(std::abs(gh.direction.at(x, 4)) - std::numbers::pi / 2) < 1e-12);
  }
}

TEST_CASE("canny") {
  CHECK_THROWS_AS(canny(testing::constant_gray(4, 4, 0), 1.0, 150, 50), Error);
  CHECK_THROWS_AS(canny(testing::constant_gray(4, 4, 0), 1.0, 0, 50), Error);
  CHECK(canny(testing::constant_gray(16, 16, 77), 1.0, 50, 150).count() == 0u);

  SUBCASE("vertical step gives a one-pixel chain at the boundary") {
    const Raster img = testing::halves(32, 32, 0, 255);
    const EdgeMap e = canny(img, 1.0, 50, 150);
    int near = 0, total = 0;
    for (int y = 0; y < 32; ++y) {
      int in_row = 0;
      for (int x = 0; x < 32; ++x) {
        if (!e.at(x, y)) continue;
        ++in_row;
        ++total;
        // the step lies between columns 15 and 16
        if (std::abs(x - 15.5) <= 1.5) ++near;
      }
      CHECK(in_row == 1);
    }
    REQUIRE(total > 0);
    CHECK(near >= 0.9 * total);
  }
  SUBCASE("adding a constant leaves edges unchanged") {
    std::mt19937_64 rng(12);
    Raster img(40, 40, 1);
    std::uniform_int_distribution<int> v(20, 200);
    for (int by = 0; by < 40; by += 10)
      for (int bx = 0; bx < 40; bx += 10) {
        const auto value = static_cast<std::uint8_t>(v(rng));
        for (int y = by; y < by + 10; ++y)
          for (int x = bx; x < bx + 10; ++x) img.at(x, y) = value;
      }
    Raster shifted = img;
    for (auto& b : shifted.data()) b = static_cast<std::uint8_t>(b + 10);
    CHECK(canny(img, 1.4, 50, 150) == canny(shifted, 1.4, 50, 150));
  }
  SUBCASE("suppression keeps only positive-magnitude pixels") {
    std::mt19937_64 rng(13);
    const Raster img = gaussian_blur(testing::random_gray(30, 30, rng), 1.0);
    const auto g = sobel_gradients(img);
    const EdgeMap thin = non_maximum_suppression(g);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x)
        if (thin.at(x, y)) CHECK(g.magnitude.at(x, y) > 0.0);
  }
}

TEST_CASE("edges to mask") {
  CHECK(edges_to_mask(EdgeMap(10, 10)).count() == 0u);

  const EdgeMap closed = square_contour(20, 5, 5, 10);
  const BinaryMask filled = edges_to_mask(closed);
  BinaryMask expected(20, 20);
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) expected.set(x, y, true);
  CHECK(filled == expected);

  EdgeMap gap = closed;
  gap.set(9, 5, false);
  CHECK(edges_to_mask(gap) == filled);

  SUBCASE("no foreground pixel is reachable from the border around closed edges") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      EdgeMap e(24, 24);
      std::bernoulli_distribution coin(0.15);
      for (auto& f : e.flags) f = coin(rng);
      const BinaryMask walls = morph::close(BinaryMask(24, 24, e.flags), 2);
      const auto ext = exterior_of(walls);
      const BinaryMask m = edges_to_mask(e);
      for (std::size_t i = 0; i < m.size(); ++i) CHECK(!(m[i] && ext[i]));
      for (std::size_t i = 0; i < m.size(); ++i) CHECK((m[i] != 0) == (ext[i] == 0));
    }
  }
}

TEST_CASE("region growing") {
  CHECK_THROWS_AS(region_grow(testing::constant_gray(4, 4, 1), LabelRaster(4, 4), 1.0), Error);
  CHECK(region_grow(testing::constant_gray(9, 7, 50), one_seed(9, 7, 3, 3), 0.0).count() == 63u);

  const Raster two = testing::halves(20, 10, 10, 200);
  BinaryMask left(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) left.set(x, y, true);
  CHECK(region_grow(two, one_seed(20, 10, 2, 2), 0.0) == left);

  SUBCASE("background seeds never join") {
    LabelRaster seeds = one_seed(9, 7, 0, 0);
    seeds.set(5, 5, SeedLabel::Background);
    const BinaryMask m = region_grow(testing::constant_gray(9, 7, 50), seeds, 0.0);
    CHECK(m.at(5, 5) == 0);
    CHECK(m.count() == 62u);
  }
  SUBCASE("monotone in tau on bi-constant images") {
    std::size_t previous = 0;
    for (double tau : {0.0, 50.0, 100.0, 189.0, 190.0, 300.0}) {
      const std::size_t n = region_grow(two, one_seed(20, 10, 2, 2), tau).count();
      CHECK(n >= previous);
      previous = n;
    }
    CHECK(previous == 200u);
  }
  SUBCASE("noisy disk, tau 25, interior seed: IoU >= 0.95") {
    const auto spec = testing::fixture_spec("noisy_disk");
    for (int i = 0; i < spec.n_images; ++i) {
      const auto item = bench::make_synthetic_item(spec, i);
      const auto& s = *item.shape;
      const auto seeds = one_seed(64, 64, static_cast<int>(std::lround(s.cx)), static_cast<int>(std::lround(s.cy)));
      CHECK(metrics::iou(item.gt, region_grow(item.image, seeds, 25.0)) >= 0.95);
    }
  }
}
