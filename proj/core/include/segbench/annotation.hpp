#pragma once

#include <string>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench {

enum class StrokeLabel { Foreground, Background };

struct Stroke {
  StrokeLabel label = StrokeLabel::Foreground;
  std::vector<Point> points;
  int radius = 1;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

/// Ordered scribbles; the user-input currency of every interaction protocol.
struct Annotation {
  std::vector<Stroke> strokes;

  bool empty() const noexcept { return strokes.empty(); }
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Offsets (dx, dy) with dx^2 + dy^2 <= radius^2, row-major.
std::vector<Point> disk_offsets(int radius);

/// Points visited when walking from `a` to `b` in unit steps along the
/// dominant axis, endpoints included.
std::vector<Point> sample_segment(Point a, Point b);

/// Throws OutOfBounds naming the first offending stroke/point index, or
/// InvalidArgument for a non-positive radius or an empty stroke.
void validate_annotation(const Annotation& ann, int width, int height);

/// Paints a filled disk at every stroke point and along the unit-sampled
/// segment between consecutive points. Disks are clipped at the image
/// border. Later strokes overwrite earlier ones.
LabelRaster rasterize(const Annotation& ann, int width, int height);

/// Paints `stroke` on top of an existing seed raster (last writer wins).
void paint_stroke(LabelRaster& seeds, const Stroke& stroke);

/// Writes the stroke's footprint into a mask with the stroke's label.
void paint_stroke(BinaryMask& mask, const Stroke& stroke);

std::string annotation_to_json(const Annotation& ann);
Annotation annotation_from_json(const std::string& text);

}  // namespace segbench
