#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "hash.hpp"
#include "json_codec.hpp"
#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"

namespace segbench::bench {
namespace {

using detail::json;

/// Portable draws: std distributions are not specified bit-for-bit.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
    spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool spare_ = false;
  double cached_ = 0.0;
};

std::string image_id(int index) {
  std::string s = std::to_string(index);
  if (s.size() < 3) s.insert(0, 3 - s.size(), '0');
  return s;
}

ShapeKind shape_from_name(const std::string& name) {
  if (name == "disk") return ShapeKind::Disk;
  if (name == "rectangle") return ShapeKind::Rectangle;
  if (name == "blob") return ShapeKind::Blob;
  throw Error(ErrorCode::ConfigError, "unknown shape '" + name + "'");
}

std::array<int, 3> color_field(const json& j, const char* key, std::array<int, 3> fallback, int gray_fallback,
                               bool& gray_given, int& gray_value) {
  if (!j.contains(key)) {
    gray_value = gray_fallback;
    return fallback;
  }
  const json& v = j.at(key);
  if (v.is_number_integer()) {
    gray_given = true;
    gray_value = v.get<int>();
    return {gray_value, gray_value, gray_value};
  }
  if (v.is_array() && v.size() == 3) {
    gray_value = gray_fallback;
    return {v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
  }
  throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must be an integer or [r, g, b]");
}

json shape_to_json(const ShapeInfo& s) {
  json j = {{"kind", to_string(s.kind)}};
  if (s.kind == ShapeKind::Rectangle) {
    j["x0"] = s.rect_x0;
    j["y0"] = s.rect_y0;
    j["w"] = s.rect_w;
    j["h"] = s.rect_h;
  } else {
    j["cx"] = s.cx;
    j["cy"] = s.cy;
    j["radius"] = s.radius;
  }
  return j;
}

ShapeInfo shape_from_json(const json& j) {
  ShapeInfo s;
  s.kind = shape_from_name(j.at("kind").get<std::string>());
  if (s.kind == ShapeKind::Rectangle) {
    s.rect_x0 = j.at("x0").get<int>();
    s.rect_y0 = j.at("y0").get<int>();
    s.rect_w = j.at("w").get<int>();
    s.rect_h = j.at("h").get<int>();
  } else {
    s.cx = j.at("cx").get<double>();
    s.cy = j.at("cy").get<double>();
    s.radius = j.at("radius").get<double>();
  }
  return s;
}

json spec_to_json(const SyntheticSpec& spec) {
  json shapes = json::array();
  for (auto s : spec.shapes) shapes.push_back(to_string(s));
  json j = {{"n_images", spec.n_images}, {"size", spec.size}, {"shapes", shapes}, {"color", spec.color}};
  if (spec.color) {
    j["fg"] = spec.fg_rgb;
    j["bg"] = spec.bg_rgb;
  } else {
    j["fg"] = spec.fg_gray;
    j["bg"] = spec.bg_gray;
  }
  j["noise_sigma"] = spec.noise_sigma;
  j["rng_seed"] = spec.rng_seed;
  return j;
}

void validate(const SyntheticSpec& spec) {
  if (spec.n_images < 1) throw Error(ErrorCode::ConfigError, "n_images must be >= 1");
  if (spec.size < 16 || spec.size > 4096) throw Error(ErrorCode::ConfigError, "size must be in [16, 4096]");
  if (spec.shapes.empty()) throw Error(ErrorCode::ConfigError, "shapes must not be empty");
  if (spec.noise_sigma < 0.0) throw Error(ErrorCode::ConfigError, "noise_sigma must be >= 0");
  auto in_range = [](int v) { return v >= 0 && v <= 255; };
  if (!in_range(spec.fg_gray) || !in_range(spec.bg_gray)) throw Error(ErrorCode::ConfigError, "intensity out of range");
  for (int c = 0; c < 3; ++c) {
    if (!in_range(spec.fg_rgb[c]) || !in_range(spec.bg_rgb[c])) {
      throw Error(ErrorCode::ConfigError, "color out of range");
    }
  }
}

}  // namespace

const DatasetItem* Dataset::find(const std::string& id) const {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

std::string_view to_string(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::Disk: return "disk";
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Blob: return "blob";
  }
  return "disk";
}

SyntheticSpec parse_synthetic_spec(const std::string& json_text) {
  const json j = detail::parse_json(json_text);
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "dataset spec must be an object");
  for (const auto& [key, value] : j.items()) {
    static const std::array<std::string_view, 8> known{"n_images", "size", "shapes", "color",
                                                       "fg", "bg", "noise_sigma", "rng_seed"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in dataset spec");
    }
  }
  SyntheticSpec spec;
  spec.n_images = detail::get_or(j, "n_images", spec.n_images);
  spec.size = detail::get_or(j, "size", spec.size);
  if (j.contains("shapes")) {
    spec.shapes.clear();
    const json& shapes = j.at("shapes");
    if (shapes.is_string()) {
      spec.shapes.push_back(shape_from_name(shapes.get<std::string>()));
    } else {
      for (const auto& s : shapes) spec.shapes.push_back(shape_from_name(s.get<std::string>()));
    }
  }
  const bool rgb_given = (j.contains("fg") && j.at("fg").is_array()) || (j.contains("bg") && j.at("bg").is_array());
  spec.color = detail::get_or(j, "color", rgb_given);
  bool gray_given = false;
  spec.fg_rgb = color_field(j, "fg", spec.fg_rgb, spec.fg_gray, gray_given, spec.fg_gray);
  spec.bg_rgb = color_field(j, "bg", spec.bg_rgb, spec.bg_gray, gray_given, spec.bg_gray);
  spec.noise_sigma = detail::get_or(j, "noise_sigma", spec.noise_sigma);
  spec.rng_seed = detail::get_or(j, "rng_seed", spec.rng_seed);
  validate(spec);
  return spec;
}

SyntheticSpec load_synthetic_spec(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_synthetic_spec(std::string(bytes.begin(), bytes.end()));
}

DatasetItem make_synthetic_item(const SyntheticSpec& spec, int index) {
  validate(spec);
  const int s = spec.size;
  Sampler rng(detail::splitmix64(spec.rng_seed ^ detail::splitmix64(static_cast<std::uint64_t>(index) + 1)));

  ShapeInfo shape;
  shape.kind = spec.shapes[static_cast<std::size_t>(index) % spec.shapes.size()];
  std::array<double, 4> blob{};
  switch (shape.kind) {
    case ShapeKind::Disk: {
      shape.radius = s * rng.uniform(0.2, 0.3);
      shape.cx = rng.uniform(shape.radius + 2.0, s - 3.0 - shape.radius);
      shape.cy = rng.uniform(shape.radius + 2.0, s - 3.0 - shape.radius);
      break;
    }
    case ShapeKind::Rectangle: {
      shape.rect_w = static_cast<int>(s * rng.uniform(0.3, 0.6));
      shape.rect_h = static_cast<int>(s * rng.uniform(0.3, 0.6));
      shape.rect_x0 = 2 + static_cast<int>(rng.uniform() * (s - shape.rect_w - 4));
      shape.rect_y0 = 2 + static_cast<int>(rng.uniform() * (s - shape.rect_h - 4));
      break;
    }
    case ShapeKind::Blob: {
      shape.radius = s * rng.uniform(0.18, 0.26);
      blob = {rng.uniform(0.05, 0.15), rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.05, 0.15),
              rng.uniform(0.0, 2.0 * std::numbers::pi)};
      const double reach = shape.radius * 1.3;
      shape.cx = rng.uniform(reach + 2.0, s - 3.0 - reach);
      shape.cy = rng.uniform(reach + 2.0, s - 3.0 - reach);
      break;
    }
  }

  BinaryMask gt(s, s);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      bool inside = false;
      const double dx = x - shape.cx;
      const double dy = y - shape.cy;
      switch (shape.kind) {
        case ShapeKind::Disk: inside = dx * dx + dy * dy <= shape.radius * shape.radius; break;
        case ShapeKind::Rectangle:
          inside = x >= shape.rect_x0 && x < shape.rect_x0 + shape.rect_w && y >= shape.rect_y0 &&
                   y < shape.rect_y0 + shape.rect_h;
          break;
        case ShapeKind::Blob: {
          const double theta = std::atan2(dy, dx);
          const double r = shape.radius * (1.0 + blob[0] * std::sin(2.0 * theta + blob[1]) +
                                           blob[2] * std::sin(3.0 * theta + blob[3]));
          inside = std::sqrt(dx * dx + dy * dy) <= r;
          break;
        }
      }
      gt.set(x, y, inside);
    }
  }

  const int channels = spec.color ? 3 : 1;
  Raster img(s, s, channels);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const bool fg = gt.at(x, y) != 0;
      for (int c = 0; c < channels; ++c) {
        const int base = spec.color ? (fg ? spec.fg_rgb[c] : spec.bg_rgb[c]) : (fg ? spec.fg_gray : spec.bg_gray);
        double v = base;
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
        img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return DatasetItem{image_id(index), std::move(img), std::move(gt), shape};
}

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  Dataset ds;
  for (int i = 0; i < spec.n_images; ++i) ds.items.push_back(make_synthetic_item(spec, i));
  return ds;
}

void generate_synthetic_dataset(const SyntheticSpec& spec, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  json images = json::array();
  for (int i = 0; i < spec.n_images; ++i) {
    const DatasetItem item = make_synthetic_item(spec, i);
    const std::string img_name = "img_" + item.id + ".png";
    const std::string gt_name = "gt_" + item.id + ".png";
    save_image(item.image, out_dir / img_name);
    save_mask(item.gt, out_dir / gt_name);
    images.push_back({{"id", item.id}, {"image", img_name}, {"gt", gt_name}, {"shape", shape_to_json(*item.shape)}});
  }
  const json manifest = {{"spec", spec_to_json(spec)}, {"images", std::move(images)}};
  const std::string text = manifest.dump(2) + "\n";
  write_file_bytes(out_dir / "manifest.json",
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::FileNotFound, "dataset directory not found: " + dir.string());
  Dataset ds;
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const auto bytes = read_file_bytes(manifest_path);
    const json manifest = detail::parse_json(std::string(bytes.begin(), bytes.end()));
    try {
      for (const auto& entry : manifest.at("images")) {
        DatasetItem item;
        item.id = entry.at("id").get<std::string>();
        item.image = load_image(dir / entry.at("image").get<std::string>());
        item.gt = load_mask(dir / entry.at("gt").get<std::string>());
        if (entry.contains("shape")) item.shape = shape_from_json(entry.at("shape"));
        ds.items.push_back(std::move(item));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad dataset manifest: ") + e.what());
    }
  } else {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("img_") && entry.path().extension() == ".png") {
        const std::string id = name.substr(4, name.size() - 8);
        if (fs::exists(dir / ("gt_" + id + ".png"))) ids.push_back(id);
      }
    }
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
      ds.items.push_back({id, load_image(dir / ("img_" + id + ".png")), load_mask(dir / ("gt_" + id + ".png")), {}});
    }
  }
  for (const auto& item : ds.items) {
    if (item.gt.width() != item.image.width() || item.gt.height() != item.image.height()) {
      throw Error(ErrorCode::DimensionMismatch, "ground truth for image " + item.id + " has wrong dimensions");
    }
  }
  if (ds.items.empty()) throw Error(ErrorCode::ConfigError, "no images found in " + dir.string());
  return ds;
}

}  // namespace segbench::bench
