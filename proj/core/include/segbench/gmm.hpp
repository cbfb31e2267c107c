#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace segbench::opt {

using Rgb = std::array<double, 3>;

/// Variances are floored here after every M-step.
inline constexpr double kVarianceFloor = 1e-4;

struct GmmComponent {
  double weight = 0.0;
  Rgb mean{};
  Rgb variance{};  // diagonal covariance
};

/// Diagonal-covariance Gaussian mixture over RGB values in [0, 1].
struct Gmm {
  std::vector<GmmComponent> components;

  int size() const noexcept { return static_cast<int>(components.size()); }
};

struct GmmFit {
  Gmm model;
  /// Total log-likelihood after initialization, then after every EM step.
  std::vector<double> log_likelihood;
  int em_iterations = 0;
};

/// k-means++ seeding and 10 Lloyd iterations, then EM until the
/// log-likelihood improves by less than 1e-6 or `max_iters` steps ran.
/// Throws TooFewSamples when fewer than K pixels are given.
GmmFit fit_gmm(std::span<const Rgb> pixels, int K, int max_iters = 20, std::uint64_t rng_seed = 0);

/// Density of one diagonal Gaussian component (without its weight).
double component_density(const GmmComponent& c, const Rgb& x);

/// Sum_k weight_k * N(x; mean_k, variance_k).
double gmm_density(const Gmm& g, const Rgb& x);

/// -log of the mixture density floored at 1e-12.
double gmm_neg_loglik(const Gmm& g, const Rgb& x);

double total_log_likelihood(const Gmm& g, std::span<const Rgb> pixels);

}  // namespace segbench::opt
