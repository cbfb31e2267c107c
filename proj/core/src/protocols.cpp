#include <functional>

#include "segbench/error.hpp"
#include "segbench/interaction.hpp"
#include "segbench/metrics.hpp"
#include "segbench/morphology.hpp"

namespace segbench {

double SessionRecord::interaction_seconds() const {
  double total = 0.0;
  for (const auto& e : events) total += e.simulated_time;
  return total;
}

namespace interact {
namespace {

class SessionBuilder {
 public:
  SessionBuilder(const Raster& img, const BinaryMask& gt, const SimulatedUserParams& params, std::string protocol)
      : img_(img), gt_(gt), params_(params) {
    if (img.width() != gt.width() || img.height() != gt.height()) {
      throw Error(ErrorCode::DimensionMismatch, "ground truth does not match image dimensions");
    }
    record_.protocol_id = std::move(protocol);
  }

  const BinaryMask& current() const { return record_.masks.back(); }
  Annotation& pool() { return pool_; }

  void add_event(InteractionEvent event, InteractionKind kind) {
    event.index = static_cast<int>(record_.events.size());
    event.kind = kind;
    event.simulated_time = params_.seconds_per_interaction;
    record_.events.push_back(std::move(event));
  }

  void add_mask(BinaryMask mask) {
    if (!mask.same_shape(gt_)) throw Error(ErrorCode::DimensionMismatch, "segmenter returned a mask of wrong size");
    record_.iou_trace.push_back(metrics::iou(gt_, mask));
    record_.masks.push_back(std::move(mask));
  }

  template <typename F>
  BinaryMask timed(F&& f) {
    auto result = metrics::time_block(std::forward<F>(f));
    record_.compute_times.push_back(result.seconds);
    return std::move(result.value);
  }

  void run_initial(const Segmenter& segmenter) {
    if (segmenter.automatic) {
      add_mask(timed([&] { return segmenter.automatic(img_); }));
    } else if (segmenter.seeded) {
      InteractionEvent seeding;
      seeding.annotation = simulate_initial_seeds(gt_, params_);
      pool_.strokes = seeding.annotation.strokes;
      add_event(std::move(seeding), InteractionKind::InitialSeeding);
      const LabelRaster seeds = rasterize(pool_, img_.width(), img_.height());
      add_mask(timed([&] { return segmenter.seeded(img_, seeds); }));
    } else {
      throw Error(ErrorCode::InvalidArgument, "segmenter '" + segmenter.id + "' has no entry point");
    }
  }

  /// Corrections until the target IoU, the interaction budget, or a perfect
  /// mask is reached. `step` turns the newest event into the next mask.
  void correction_loop(InteractionKind kind, const std::function<BinaryMask(const InteractionEvent&)>& step) {
    while (static_cast<int>(record_.events.size()) < params_.max_interactions) {
      if (record_.iou_trace.back() >= params_.target_iou) break;
      auto event = next_correction(gt_, current(), params_);
      if (!event) break;
      add_event(std::move(*event), kind);
      add_mask(step(record_.events.back()));
    }
  }

  BinaryMask painted(const InteractionEvent& event) const {
    BinaryMask mask = current();
    for (const auto& stroke : event.annotation.strokes) paint_stroke(mask, stroke);
    return mask;
  }

  /// Auto-seeds of the current mask overlaid with every stroke so far.
  LabelRaster prior_seeds(int erosion) const {
    LabelRaster seeds = auto_seeds(current(), erosion);
    for (const auto& stroke : pool_.strokes) paint_stroke(seeds, stroke);
    return seeds;
  }

  SessionRecord finish() {
    record_.initial_iou = record_.iou_trace.front();
    record_.refined_iou = record_.iou_trace.back();
    if (gt_.count() > 0) {
      const auto ab = metrics::alpha_beta(gt_, record_.masks.front());
      record_.initial_alpha = ab.alpha;
      record_.initial_beta = ab.beta;
    }
    return std::move(record_);
  }

  const Raster& image() const { return img_; }

 private:
  const Raster& img_;
  const BinaryMask& gt_;
  const SimulatedUserParams& params_;
  SessionRecord record_;
  Annotation pool_;
};

BinaryMask refine_with_prior(SessionBuilder& session, const InteractionEvent& event, const SeededSegmentFn& refiner,
                             int erosion) {
  for (const auto& stroke : event.annotation.strokes) session.pool().strokes.push_back(stroke);
  const LabelRaster seeds = session.prior_seeds(erosion);
  if (!seeds.has_foreground() || !seeds.has_background()) {
    // Nothing to anchor one of the classes yet; keep the user's stroke.
    return session.painted(event);
  }
  return session.timed([&] { return refiner(session.image(), seeds); });
}

}  // namespace

LabelRaster auto_seeds(const BinaryMask& current, int erosion) {
  const BinaryMask fg = morph::erode(current, erosion, true);
  const BinaryMask bg = morph::erode(morph::complement(current), erosion, true);
  LabelRaster seeds(current.width(), current.height());
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (fg[i]) seeds.set(i, SeedLabel::Foreground);
    if (bg[i]) seeds.set(i, SeedLabel::Background);
  }
  return seeds;
}

SessionRecord run_algorithm_assists_user(const Segmenter& segmenter, const Raster& img, const BinaryMask& gt,
                                         const SimulatedUserParams& params, RefineMode mode,
                                         const ProtocolOptions& options) {
  SessionBuilder session(img, gt, params,
                         mode == RefineMode::Paint ? "algorithm_assists_user:paint"
                                                   : "algorithm_assists_user:graphcut_refine");
  session.run_initial(segmenter);
  if (mode == RefineMode::Paint) {
    session.correction_loop(InteractionKind::DirectPaint,
                            [&](const InteractionEvent& event) { return session.painted(event); });
  } else {
    const SeededSegmentFn graph_cut = [&](const Raster& image, const LabelRaster& seeds) {
      return opt::graph_cut_segment(image, seeds, options.graph);
    };
    session.correction_loop(InteractionKind::Correction, [&](const InteractionEvent& event) {
      return refine_with_prior(session, event, graph_cut, options.auto_seed_erosion);
    });
  }
  return session.finish();
}

SessionRecord run_user_assists_algorithm(const SeededSegmentFn& refiner, const Raster& img, const BinaryMask& gt,
                                         const SimulatedUserParams& params) {
  SessionBuilder session(img, gt, params, "user_assists_algorithm");
  session.run_initial(Segmenter{"refiner", nullptr, refiner});
  session.correction_loop(InteractionKind::Correction, [&](const InteractionEvent& event) {
    for (const auto& stroke : event.annotation.strokes) session.pool().strokes.push_back(stroke);
    const LabelRaster seeds = rasterize(session.pool(), img.width(), img.height());
    return session.timed([&] { return refiner(img, seeds); });
  });
  return session.finish();
}

SessionRecord run_hybrid(const Segmenter& segmenter, const SeededSegmentFn& refiner, const Raster& img,
                         const BinaryMask& gt, const SimulatedUserParams& params, const ProtocolOptions& options) {
  SessionBuilder session(img, gt, params, "hybrid");
  session.run_initial(segmenter);
  session.correction_loop(InteractionKind::Correction, [&](const InteractionEvent& event) {
    return refine_with_prior(session, event, refiner, options.auto_seed_erosion);
  });
  return session.finish();
}

}  // namespace interact
}  // namespace segbench
