#include "segbench/annotation.hpp"

#include <algorithm>
#include <cstdlib>

#include "segbench/error.hpp"
#include "json_codec.hpp"

namespace segbench {
namespace {

template <typename Paint>
void for_each_footprint_pixel(const Stroke& stroke, int width, int height, Paint&& paint) {
  const auto offsets = disk_offsets(stroke.radius);
  auto stamp = [&](Point c) {
    for (const auto& o : offsets) {
      const int x = c.x + o.x;
      const int y = c.y + o.y;
      if (x >= 0 && y >= 0 && x < width && y < height) paint(x, y);
    }
  };
  if (stroke.points.size() == 1) {
    stamp(stroke.points.front());
    return;
  }
  for (std::size_t i = 0; i + 1 < stroke.points.size(); ++i) {
    for (const auto& p : sample_segment(stroke.points[i], stroke.points[i + 1])) stamp(p);
  }
}

}  // namespace

std::vector<Point> disk_offsets(int radius) {
  std::vector<Point> out;
  const int r2 = radius * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= r2) out.push_back({dx, dy});
    }
  }
  return out;
}

std::vector<Point> sample_segment(Point a, Point b) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int steps = std::max(std::abs(dx), std::abs(dy));
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  if (steps == 0) {
    out.push_back(a);
    return out;
  }
  for (int i = 0; i <= steps; ++i) {
    // Integer rounding of a + (b - a) * i / steps, half away from zero.
    auto lerp = [&](int from, int delta) {
      const long num = static_cast<long>(delta) * i;
      const long q = (2 * std::labs(num) + steps) / (2L * steps);
      return from + static_cast<int>(num < 0 ? -q : q);
    };
    out.push_back({lerp(a.x, dx), lerp(a.y, dy)});
  }
  return out;
}

void validate_annotation(const Annotation& ann, int width, int height) {
  for (std::size_t s = 0; s < ann.strokes.size(); ++s) {
    const auto& stroke = ann.strokes[s];
    if (stroke.radius < 1) {
      throw Error(ErrorCode::InvalidArgument, "stroke " + std::to_string(s) + " has radius < 1");
    }
    if (stroke.points.empty()) {
      throw Error(ErrorCode::InvalidArgument, "stroke " + std::to_string(s) + " has no points");
    }
    for (std::size_t p = 0; p < stroke.points.size(); ++p) {
      const auto& pt = stroke.points[p];
      if (pt.x < 0 || pt.y < 0 || pt.x >= width || pt.y >= height) {
        throw Error(ErrorCode::OutOfBounds, "stroke " + std::to_string(s) + " point " + std::to_string(p) + " (" +
                                                std::to_string(pt.x) + "," + std::to_string(pt.y) +
                                                ") lies outside " + std::to_string(width) + "x" +
                                                std::to_string(height));
      }
    }
  }
}

void paint_stroke(LabelRaster& seeds, const Stroke& stroke) {
  const SeedLabel v = stroke.label == StrokeLabel::Foreground ? SeedLabel::Foreground : SeedLabel::Background;
  for_each_footprint_pixel(stroke, seeds.width(), seeds.height(), [&](int x, int y) { seeds.set(x, y, v); });
}

void paint_stroke(BinaryMask& mask, const Stroke& stroke) {
  const bool fg = stroke.label == StrokeLabel::Foreground;
  for_each_footprint_pixel(stroke, mask.width(), mask.height(), [&](int x, int y) { mask.set(x, y, fg); });
}

LabelRaster rasterize(const Annotation& ann, int width, int height) {
  validate_annotation(ann, width, height);
  LabelRaster seeds(width, height);
  for (const auto& stroke : ann.strokes) paint_stroke(seeds, stroke);
  return seeds;
}

std::string annotation_to_json(const Annotation& ann) {
  return detail::to_json(ann).dump();
}

Annotation annotation_from_json(const std::string& text) {
  return detail::annotation_from_json(detail::parse_json(text));
}

}  // namespace segbench
