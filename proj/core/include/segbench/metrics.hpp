#pragma once

#include <chrono>
#include <optional>
#include <type_traits>
#include <utility>

#include "segbench/raster.hpp"

namespace segbench {

struct SessionRecord;

namespace metrics {

/// |GT n P| / |GT u P|; two empty masks agree perfectly (1.0).
double iou(const BinaryMask& gt, const BinaryMask& pred);

/// refined_iou - initial_iou. Throws EmptyRecord for a record without masks.
double iou_improvement(const SessionRecord& record);

/// alpha (expansion factor) = |GT u P| / |GT|, beta (area ratio) = |P| / |GT|.
struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};
AlphaBeta alpha_beta(const BinaryMask& gt, const BinaryMask& pred);

/// Quality fields are empty when no ground truth is available (alpha and
/// beta also when the ground truth is empty).
struct MetricsSnapshot {
  std::optional<double> iou;
  std::optional<double> alpha;
  std::optional<double> beta;
  double compute_seconds = 0.0;
  double interaction_seconds = 0.0;
};

template <typename T>
struct Timed {
  T value;
  double seconds = 0.0;
};

template <>
struct Timed<void> {
  double seconds = 0.0;
};

/// Monotonic wall time around exactly one invocation of `f`.
template <typename F>
auto time_block(F&& f) {
  using R = std::invoke_result_t<F>;
  const auto start = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(f)();
    const auto stop = std::chrono::steady_clock::now();
    return Timed<void>{std::chrono::duration<double>(stop - start).count()};
  } else {
    R value = std::forward<F>(f)();
    const auto stop = std::chrono::steady_clock::now();
    return Timed<R>{std::move(value), std::chrono::duration<double>(stop - start).count()};
  }
}

}  // namespace metrics
}  // namespace segbench
