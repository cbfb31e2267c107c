#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segbench/annotation.hpp"
#include "segbench/graphcut.hpp"
#include "segbench/raster.hpp"

namespace segbench {

struct SimulatedUserParams {
  int brush_radius = 4;
  double seconds_per_interaction = 2.0;
  int max_interactions = 10;
  double target_iou = 0.95;
  std::uint64_t rng_seed = 0;
};

enum class InteractionKind { InitialSeeding, Correction, DirectPaint };

struct InteractionEvent {
  int index = 0;
  InteractionKind kind = InteractionKind::Correction;
  Annotation annotation;
  double simulated_time = 0.0;
};

/// One image run under one protocol. masks[0] is the first algorithmic
/// mask; iou_trace has one entry per mask.
struct SessionRecord {
  std::string image_id;
  std::string algorithm_id;
  std::string protocol_id;
  bool external = false;
  std::vector<InteractionEvent> events;
  std::vector<BinaryMask> masks;
  std::vector<double> compute_times;
  double initial_iou = 0.0;
  double refined_iou = 0.0;
  std::vector<double> iou_trace;
  /// Alpha/beta of masks[0]; absent when the ground truth is empty.
  std::optional<double> initial_alpha;
  std::optional<double> initial_beta;

  double interaction_seconds() const;
  /// Wall time of the invocation that produced masks[0].
  double initial_compute_seconds() const { return compute_times.empty() ? 0.0 : compute_times.front(); }
};

/// Serialized form used by records/*.json. Without timing, compute times are
/// omitted so two runs with equal seeds compare byte-equal.
std::string record_to_json(const SessionRecord& record, bool include_timing = true);
SessionRecord record_from_json(const std::string& text);

namespace interact {

/// One foreground and one background point at the deepest pixel (4-connected
/// distance to the other class or the border; row-major first on ties), with
/// radius min(brush, depth - 1) floored at 1 and shrunk until the disk stays
/// inside its class. Throws DegenerateGt when a class is empty.
Annotation simulate_initial_seeds(const BinaryMask& gt, const SimulatedUserParams& params);

/// Greedy corrective click: the largest 4-connected error component (pixels
/// sharing the same ground-truth label; ties go to the component holding the
/// row-major-first error pixel) receives a stroke with the ground-truth label
/// at its deepest pixel. The stroke never covers a pixel whose ground truth
/// differs from its label; if the deepest pixel admits no such disk the
/// stroke is placed on an adjacent in-class pixel instead. Returns nullopt
/// iff current == gt.
std::optional<InteractionEvent> next_correction(const BinaryMask& gt, const BinaryMask& current,
                                                const SimulatedUserParams& params);

using AutoSegmentFn = std::function<BinaryMask(const Raster&)>;
using SeededSegmentFn = std::function<BinaryMask(const Raster&, const LabelRaster&)>;

/// An initial-mask producer. Automatic segmenters run unaided; seeded ones
/// (graph cut, region growing, ...) receive the simulated user's initial
/// seeds, which count as the first interaction.
struct Segmenter {
  std::string id;
  AutoSegmentFn automatic;
  SeededSegmentFn seeded;
};

enum class RefineMode { Paint, GraphCutRefine };

struct ProtocolOptions {
  int auto_seed_erosion = 3;
  opt::GraphCutParams graph;
};

/// Seeds derived from a mask: its foreground and background each eroded by
/// `erosion` 3x3 steps. The image border does not erode.
LabelRaster auto_seeds(const BinaryMask& current, int erosion);

/// Algorithm first, then user corrections: painted directly into the mask,
/// or fed with auto-seeds from the current mask into a graph cut.
SessionRecord run_algorithm_assists_user(const Segmenter& segmenter, const Raster& img, const BinaryMask& gt,
                                         const SimulatedUserParams& params, RefineMode mode,
                                         const ProtocolOptions& options = {});

/// Simulated seeds first; the refiner re-runs on the accumulated strokes
/// after every correction.
SessionRecord run_user_assists_algorithm(const SeededSegmentFn& refiner, const Raster& img, const BinaryMask& gt,
                                         const SimulatedUserParams& params);

/// Segmenter produces the initial mask; each correction is added to the
/// stroke pool and the refiner re-segments from auto-seeds of the current
/// mask overlaid with every stroke.
SessionRecord run_hybrid(const Segmenter& segmenter, const SeededSegmentFn& refiner, const Raster& img,
                         const BinaryMask& gt, const SimulatedUserParams& params, const ProtocolOptions& options = {});

}  // namespace interact
}  // namespace segbench
