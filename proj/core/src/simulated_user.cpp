#include <algorithm>
#include <numeric>

#include "segbench/error.hpp"
#include "segbench/interaction.hpp"
#include "segbench/morphology.hpp"

namespace segbench::interact {
namespace {

std::vector<std::uint8_t> class_membership(const BinaryMask& gt, std::uint8_t label) {
  std::vector<std::uint8_t> member(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) member[i] = gt[i] == label ? 1 : 0;
  return member;
}

/// Every in-image pixel of the disk has ground truth `label`.
bool disk_is_safe(const BinaryMask& gt, std::uint8_t label, Point c, int radius) {
  for (const auto& o : disk_offsets(radius)) {
    const int x = c.x + o.x, y = c.y + o.y;
    if (gt.contains(x, y) && gt.at(x, y) != label) return false;
  }
  return true;
}

/// Largest radius in [1, start] whose disk is safe, or 0 when none is.
int largest_safe_radius(const BinaryMask& gt, std::uint8_t label, Point c, int start) {
  for (int r = std::max(start, 1); r >= 1; --r) {
    if (disk_is_safe(gt, label, c, r)) return r;
  }
  return 0;
}

StrokeLabel to_stroke_label(std::uint8_t label) {
  return label ? StrokeLabel::Foreground : StrokeLabel::Background;
}

Point point_of(std::size_t i, int width) {
  return {static_cast<int>(i % static_cast<std::size_t>(width)), static_cast<int>(i / static_cast<std::size_t>(width))};
}

std::size_t deepest(const std::vector<int>& depth, const std::vector<std::uint8_t>& member) {
  std::size_t best = 0;
  int best_depth = -1;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (member[i] && depth[i] > best_depth) {
      best_depth = depth[i];
      best = i;
    }
  }
  return best;
}

struct Placement {
  Point center;
  int radius = 0;
};

std::optional<Placement> place_on_component(const BinaryMask& gt, const morph::Components& comps, int id,
                                            std::uint8_t label, int brush) {
  const int w = gt.width();
  std::vector<std::uint8_t> member(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) member[i] = comps.label[i] == id ? 1 : 0;
  const auto depth = morph::depth_transform(member, w, gt.height());
  const std::size_t center = deepest(depth, member);
  const Point c = point_of(center, w);
  const int start = std::max(1, std::min(brush, depth[center]));
  if (const int r = largest_safe_radius(gt, label, c, start); r > 0) return Placement{c, r};

  // The deepest pixel hugs the true boundary: try in-class pixels next to
  // the component and keep the one whose safe disk covers most of it.
  std::optional<Placement> best;
  std::size_t best_cover = 0;
  std::size_t best_index = 0;
  std::vector<std::uint8_t> tried(gt.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!member[i]) continue;
    const Point p = point_of(i, w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Point q{p.x + dx, p.y + dy};
        if (!gt.contains(q.x, q.y)) continue;
        const std::size_t qi = static_cast<std::size_t>(q.y) * w + q.x;
        if (tried[qi] || gt[qi] != label) continue;
        tried[qi] = 1;
        const int r = largest_safe_radius(gt, label, q, brush);
        if (r == 0) continue;
        std::size_t cover = 0;
        for (const auto& o : disk_offsets(r)) {
          const int x = q.x + o.x, y = q.y + o.y;
          if (gt.contains(x, y) && member[static_cast<std::size_t>(y) * w + x]) ++cover;
        }
        if (cover == 0) continue;
        if (!best || cover > best_cover || (cover == best_cover && qi < best_index)) {
          best = Placement{q, r};
          best_cover = cover;
          best_index = qi;
        }
      }
    }
  }
  return best;
}

}  // namespace

Annotation simulate_initial_seeds(const BinaryMask& gt, const SimulatedUserParams& params) {
  const std::size_t fg = gt.count();
  if (fg == 0 || fg == gt.size()) {
    throw Error(ErrorCode::DegenerateGt, "ground truth needs both foreground and background pixels");
  }
  Annotation ann;
  for (std::uint8_t label : {std::uint8_t{1}, std::uint8_t{0}}) {
    const auto member = class_membership(gt, label);
    const auto depth = morph::depth_transform(member, gt.width(), gt.height());
    const std::size_t center = deepest(depth, member);
    const Point c = point_of(center, gt.width());
    const int start = std::max(1, std::min(params.brush_radius, depth[center] - 1));
    const int r = std::max(1, largest_safe_radius(gt, label, c, start));
    ann.strokes.push_back(Stroke{to_stroke_label(label), {c}, r});
  }
  return ann;
}

std::optional<InteractionEvent> next_correction(const BinaryMask& gt, const BinaryMask& current,
                                                const SimulatedUserParams& params) {
  if (!gt.same_shape(current)) throw Error(ErrorCode::DimensionMismatch, "mask and ground truth differ in size");
  std::vector<std::uint8_t> error(gt.size());
  bool any = false;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    error[i] = gt[i] != current[i] ? 1 : 0;
    any = any || error[i];
  }
  if (!any) return std::nullopt;

  std::vector<std::uint8_t> key(gt.labels().begin(), gt.labels().end());
  const auto comps = morph::connected_components(error, key, gt.width(), gt.height());
  std::vector<int> order(comps.sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return comps.sizes[static_cast<std::size_t>(a)] > comps.sizes[static_cast<std::size_t>(b)];
  });

  const int brush = std::max(1, params.brush_radius);
  InteractionEvent event;
  event.kind = InteractionKind::Correction;
  event.simulated_time = params.seconds_per_interaction;
  for (int id : order) {
    const std::uint8_t label = gt[comps.first_pixel[static_cast<std::size_t>(id)]];
    if (auto placement = place_on_component(gt, comps, id, label, brush)) {
      event.annotation.strokes.push_back(Stroke{to_stroke_label(label), {placement->center}, placement->radius});
      return event;
    }
  }
  // Only thin structures remain: click the largest component regardless.
  const int id = order.front();
  const std::uint8_t label = gt[comps.first_pixel[static_cast<std::size_t>(id)]];
  std::vector<std::uint8_t> member(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) member[i] = comps.label[i] == id ? 1 : 0;
  const auto depth = morph::depth_transform(member, gt.width(), gt.height());
  event.annotation.strokes.push_back(
      Stroke{to_stroke_label(label), {point_of(deepest(depth, member), gt.width())}, 1});
  return event;
}

}  // namespace segbench::interact
