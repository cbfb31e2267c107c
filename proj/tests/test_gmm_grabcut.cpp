#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "segbench/error.hpp"
#include "segbench/gmm.hpp"
#include "segbench/grabcut.hpp"
#include "segbench/metrics.hpp"
#include "support.hpp"

using namespace segbench;
using namespace segbench::opt;

namespace {

std::vector<Rgb> blob(const Rgb& mean, double sd, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<Rgb> out;
  for (int i = 0; i < n; ++i) out.push_back({mean[0] + noise(rng), mean[1] + noise(rng), mean[2] + noise(rng)});
  return out;
}

double distance(const Rgb& a, const Rgb& b) {
  double d = 0;
  for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(a[c] - b[c]));
  return d;
}

Rect tight_rect(const bench::ShapeInfo& s) {
  const int x0 = static_cast<int>(std::floor(s.cx - s.radius)) - 1;
  const int y0 = static_cast<int>(std::floor(s.cy - s.radius)) - 1;
  const int x1 = static_cast<int>(std::ceil(s.cx + s.radius)) + 2;
  const int y1 = static_cast<int>(std::ceil(s.cy + s.radius)) + 2;
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

TEST_CASE("single component is the sample mean and variance") {
  std::mt19937_64 rng(1);
  const auto pts = blob({0.3, 0.5, 0.7}, 0.05, 500, rng);
  const GmmFit fit = fit_gmm(pts, 1);
  REQUIRE(fit.model.size() == 1);
  const auto& c = fit.model.components[0];
  CHECK(c.weight == doctest::Approx(1.0));
  for (int ch = 0; ch < 3; ++ch) {
    double mean = 0;
    for (const auto& p : pts) mean += p[ch];
    mean /= static_cast<double>(pts.size());
    double var = 0;
    for (const auto& p : pts) var += (p[ch] - mean) * (p[ch] - mean);
    var = std::max(var / static_cast<double>(pts.size()), kVarianceFloor);
    CHECK(c.mean[ch] == doctest::Approx(mean).epsilon(1e-9));
    CHECK(c.variance[ch] == doctest::Approx(var).epsilon(1e-9));
  }
  const std::vector<Rgb> same(10, Rgb{0.5, 0.5, 0.5});
  for (double v : fit_gmm(same, 1).model.components[0].variance) CHECK(v == kVarianceFloor);
}

TEST_CASE("two separated blobs are recovered") {
  std::mt19937_64 rng(2);
  const Rgb a{0.2, 0.2, 0.8}, b{0.8, 0.6, 0.1};
  auto pts = blob(a, 0.03, 400, rng);
  const auto more = blob(b, 0.03, 300, rng);
  pts.insert(pts.end(), more.begin(), more.end());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Gmm g = fit_gmm(pts, 2, 20, seed).model;
    REQUIRE(g.size() == 2);
    const auto& c0 = g.components[0];
    const auto& c1 = g.components[1];
    const bool direct = distance(c0.mean, a) < distance(c1.mean, a);
    CHECK(distance(direct ? c0.mean : c1.mean, a) < 0.02);
    CHECK(distance(direct ? c1.mean : c0.mean, b) < 0.02);
    CHECK(c0.weight + c1.weight == doctest::Approx(1.0));
  }
}

TEST_CASE("EM log-likelihood never decreases") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rgb> pts;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 4; ++k) {
      const auto part = blob({u(rng), u(rng), u(rng)}, 0.02 + 0.05 * u(rng), 80, rng);
      pts.insert(pts.end(), part.begin(), part.end());
    }
    const GmmFit fit = fit_gmm(pts, 1 + trial % 5, 30, static_cast<std::uint64_t>(trial));
    REQUIRE(fit.log_likelihood.size() == static_cast<std::size_t>(fit.em_iterations) + 1);
    for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i)
      CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1] - 1e-9);
    CHECK(fit.log_likelihood.back() == doctest::Approx(total_log_likelihood(fit.model, pts)).epsilon(1e-9));
    double wsum = 0;
    for (const auto& c : fit.model.components) {
      wsum += c.weight;
      for (double v : c.variance) CHECK(v >= kVarianceFloor);
    }
    CHECK(wsum == doctest::Approx(1.0));
  }
}

TEST_CASE("too few samples") {
  const std::vector<Rgb> pts(2, Rgb{0.1, 0.2, 0.3});
  try {
    fit_gmm(pts, 3);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("negative log-likelihood") {
  Gmm unit;
  unit.components.push_back({1.0, {0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}});
  CHECK(gmm_neg_loglik(unit, {0.5, 0.5, 0.5}) == doctest::Approx(1.5 * std::log(2 * std::numbers::pi)).epsilon(1e-12));

  Gmm tight;
  tight.components.push_back({1.0, {0.2, 0.2, 0.2}, {1e-3, 1e-3, 1e-3}});
  const double at_mean = gmm_neg_loglik(tight, {0.2, 0.2, 0.2});
  const double near = gmm_neg_loglik(tight, {0.25, 0.2, 0.2});
  const double far = gmm_neg_loglik(tight, {0.9, 0.9, 0.9});
  CHECK(at_mean < near);
  CHECK(near < far);
  CHECK(std::isfinite(far));
  CHECK(far == doctest::Approx(-std::log(1e-12)));

  Gmm mix;
  mix.components.push_back({0.3, {0.1, 0.2, 0.3}, {0.01, 0.02, 0.03}});
  mix.components.push_back({0.7, {0.6, 0.5, 0.4}, {0.05, 0.04, 0.02}});
  const Rgb x{0.3, 0.3, 0.3};
  double direct = 0;
  for (const auto& c : mix.components) {
    double d = c.weight;
    for (int ch = 0; ch < 3; ++ch)
      d *= std::exp(-(x[ch] - c.mean[ch]) * (x[ch] - c.mean[ch]) / (2 * c.variance[ch])) /
           std::sqrt(2 * std::numbers::pi * c.variance[ch]);
    direct += d;
  }
  CHECK(gmm_density(mix, x) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(gmm_neg_loglik(mix, x) == doctest::Approx(-std::log(direct)).epsilon(1e-12));
}

TEST_CASE("grabcut on the colored disk") {
  const auto spec = testing::fixture_spec("colored_disk");
  for (int i = 0; i < 3; ++i) {
    const auto item = bench::make_synthetic_item(spec, i);
    REQUIRE(item.shape);
    const Rect r = tight_rect(*item.shape);
    const GrabCutResult res = grabcut(item.image, r);
    CAPTURE(i);
    CHECK(metrics::iou(item.gt, res.mask) >= 0.95);
    CHECK(res.rounds <= 5);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const bool inside = x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height;
        if (!inside) CHECK(res.mask.at(x, y) == 0);
      }

    if (res.converged) {
      // Restarting from the fixed point reproduces it in one round.
      std::vector<Trimap> trimap(item.image.pixel_count(), Trimap::HardBackground);
      for (int y = r.y; y < r.y + r.height; ++y)
        for (int x = r.x; x < r.x + r.width; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * 64 + static_cast<std::size_t>(x);
          trimap[p] = res.mask[p] ? Trimap::ProbableForeground : Trimap::ProbableBackground;
        }
      GrabCutParams one;
      one.max_rounds = 1;
      const GrabCutResult again = grabcut(item.image, trimap, one);
      CHECK(again.converged);
      CHECK(again.mask == res.mask);
    }
    GrabCutParams more;
    more.max_rounds = 12;
    const GrabCutResult longer = grabcut(item.image, r, more);
    if (res.converged) CHECK(longer.mask == res.mask);
  }
}

TEST_CASE("grabcut hard labels and degenerate inits") {
  std::mt19937_64 rng(4);
  const Raster img = testing::random_gray(20, 20, rng);
  LabelRaster seeds(20, 20);
  for (int x = 0; x < 5; ++x) seeds.set(x, 0, SeedLabel::Background);
  for (int x = 8; x < 12; ++x) seeds.set(x, 10, SeedLabel::Foreground);
  const GrabCutResult res = grabcut(img, seeds);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] == SeedLabel::Foreground) CHECK(res.mask[i] == 1);
    if (seeds[i] == SeedLabel::Background) CHECK(res.mask[i] == 0);
  }
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code_of([&] { grabcut(img, Rect{0, 0, 20, 20}); }) == ErrorCode::DegenerateInit);
  CHECK(code_of([&] { grabcut(img, Rect{3, 3, 0, 5}); }) == ErrorCode::DegenerateInit);
  CHECK(code_of([&] { grabcut(img, Rect{15, 15, 10, 2}); }) == ErrorCode::DegenerateInit);
  LabelRaster only_fg(20, 20);
  only_fg.set(5, SeedLabel::Foreground);
  CHECK(code_of([&] { grabcut(img, only_fg); }) == ErrorCode::DegenerateInit);
  // A one-pixel interior forces K down to the available sample count.
  CHECK(code_of([&] { grabcut(img, std::vector<Trimap>(400, Trimap::HardBackground)); }) == ErrorCode::DegenerateInit);
  const GrabCutResult tiny = grabcut(img, Rect{4, 4, 1, 1});
  CHECK(tiny.mask.count() <= 1u);
}
