#include "segbench/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "segbench/error.hpp"

namespace segbench::opt {
namespace {

double squared_distance(const Rgb& a, const Rgb& b) {
  double d = 0.0;
  for (int c = 0; c < 3; ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
  return d;
}

double log_component(const GmmComponent& comp, const Rgb& x) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = x[c] - comp.mean[c];
    acc += -0.5 * (d * d) / comp.variance[c] - 0.5 * std::log(2.0 * std::numbers::pi * comp.variance[c]);
  }
  return acc;
}

std::vector<Rgb> kmeans_centers(std::span<const Rgb> pixels, int K, std::mt19937_64& rng) {
  const std::size_t n = pixels.size();
  std::vector<Rgb> centers;
  centers.reserve(static_cast<std::size_t>(K));
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(pixels[first(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < K) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, squared_distance(pixels[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (chosen = 0; chosen + 1 < n; ++chosen) {
        target -= d2[chosen];
        if (target <= 0.0) break;
      }
    } else {
      chosen = first(rng);
    }
    centers.push_back(pixels[chosen]);
  }

  std::vector<int> assignment(n, 0);
  for (int iter = 0; iter < 10; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        const double d = squared_distance(pixels[i], centers[static_cast<std::size_t>(k)]);
        if (d < best) {
          best = d;
          assignment[i] = k;
        }
      }
    }
    std::vector<Rgb> sums(static_cast<std::size_t>(K), Rgb{});
    std::vector<std::size_t> counts(static_cast<std::size_t>(K), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(assignment[i]);
      for (int c = 0; c < 3; ++c) sums[k][c] += pixels[i][c];
      ++counts[k];
    }
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
      if (counts[k] == 0) continue;
      for (int c = 0; c < 3; ++c) centers[k][c] = sums[k][c] / static_cast<double>(counts[k]);
    }
  }
  return centers;
}

}  // namespace

double component_density(const GmmComponent& c, const Rgb& x) {
  return std::exp(log_component(c, x));
}

double gmm_density(const Gmm& g, const Rgb& x) {
  double sum = 0.0;
  for (const auto& c : g.components) sum += c.weight * component_density(c, x);
  return sum;
}

double gmm_neg_loglik(const Gmm& g, const Rgb& x) {
  return -std::log(std::max(gmm_density(g, x), 1e-12));
}

double total_log_likelihood(const Gmm& g, std::span<const Rgb> pixels) {
  double total = 0.0;
  std::vector<double> logs(g.components.size());
  for (const auto& x : pixels) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.components.size(); ++k) {
      const auto& comp = g.components[k];
      logs[k] = comp.weight > 0.0 ? std::log(comp.weight) + log_component(comp, x)
                                  : -std::numeric_limits<double>::infinity();
      peak = std::max(peak, logs[k]);
    }
    double s = 0.0;
    for (double l : logs) s += std::exp(l - peak);
    total += peak + std::log(s);
  }
  return total;
}

GmmFit fit_gmm(std::span<const Rgb> pixels, int K, int max_iters, std::uint64_t rng_seed) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (pixels.size() < static_cast<std::size_t>(K)) {
    throw Error(ErrorCode::TooFewSamples,
                "need at least " + std::to_string(K) + " pixels, got " + std::to_string(pixels.size()));
  }
  const std::size_t n = pixels.size();
  const auto Ks = static_cast<std::size_t>(K);
  std::mt19937_64 rng(rng_seed);
  const auto centers = kmeans_centers(pixels, K, rng);

  // Hard assignment to the k-means centers gives the starting mixture.
  GmmFit fit;
  fit.model.components.resize(Ks);
  {
    std::vector<std::size_t> counts(Ks, 0);
    std::vector<Rgb> sums(Ks, Rgb{}), sq(Ks, Rgb{});
    for (const auto& x : pixels) {
      std::size_t best_k = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < Ks; ++k) {
        const double d = squared_distance(x, centers[k]);
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      ++counts[best_k];
      for (int c = 0; c < 3; ++c) {
        sums[best_k][c] += x[c];
        sq[best_k][c] += x[c] * x[c];
      }
    }
    for (std::size_t k = 0; k < Ks; ++k) {
      auto& comp = fit.model.components[k];
      comp.weight = static_cast<double>(counts[k]) / static_cast<double>(n);
      for (int c = 0; c < 3; ++c) {
        if (counts[k] == 0) {
          comp.mean[c] = centers[k][c];
          comp.variance[c] = kVarianceFloor;
          continue;
        }
        const double m = sums[k][c] / static_cast<double>(counts[k]);
        comp.mean[c] = m;
        comp.variance[c] = std::max(sq[k][c] / static_cast<double>(counts[k]) - m * m, kVarianceFloor);
      }
    }
  }
  fit.log_likelihood.push_back(total_log_likelihood(fit.model, pixels));

  std::vector<double> resp(n * Ks);
  std::vector<double> logs(Ks);
  for (int iter = 0; iter < max_iters; ++iter) {
    // E-step in log space.
    for (std::size_t i = 0; i < n; ++i) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < Ks; ++k) {
        const auto& comp = fit.model.components[k];
        logs[k] = comp.weight > 0.0 ? std::log(comp.weight) + log_component(comp, pixels[i])
                                    : -std::numeric_limits<double>::infinity();
        peak = std::max(peak, logs[k]);
      }
      double s = 0.0;
      for (std::size_t k = 0; k < Ks; ++k) s += std::exp(logs[k] - peak);
      for (std::size_t k = 0; k < Ks; ++k) resp[i * Ks + k] = std::exp(logs[k] - peak) / s;
    }
    // M-step; a component that lost all mass keeps its parameters at weight 0.
    for (std::size_t k = 0; k < Ks; ++k) {
      double nk = 0.0;
      Rgb mean{};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * Ks + k];
        nk += r;
        for (int c = 0; c < 3; ++c) mean[c] += r * pixels[i][c];
      }
      auto& comp = fit.model.components[k];
      comp.weight = nk / static_cast<double>(n);
      if (nk <= std::numeric_limits<double>::min()) {
        comp.weight = 0.0;
        continue;
      }
      for (int c = 0; c < 3; ++c) mean[c] /= nk;
      Rgb var{};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * Ks + k];
        for (int c = 0; c < 3; ++c) {
          const double d = pixels[i][c] - mean[c];
          var[c] += r * d * d;
        }
      }
      comp.mean = mean;
      for (int c = 0; c < 3; ++c) comp.variance[c] = std::max(var[c] / nk, kVarianceFloor);
    }
    ++fit.em_iterations;
    const double ll = total_log_likelihood(fit.model, pixels);
    const double gain = ll - fit.log_likelihood.back();
    fit.log_likelihood.push_back(ll);
    if (gain < 1e-6) break;
  }
  return fit;
}

}  // namespace segbench::opt
