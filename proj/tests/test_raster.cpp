#include <doctest.h>
#include <png.h>

#include <set>

#include "segbench/annotation.hpp"
#include "segbench/error.hpp"
#include "segbench/image_io.hpp"
#include "segbench/raster.hpp"
#include "support.hpp"

using namespace segbench;

namespace {

std::vector<std::uint8_t> craft_png(int w, int h, png_uint_32 format, const void* pixels,
                                    const void* colormap = nullptr, int colormap_entries = 0) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  image.colormap_entries = static_cast<png_uint_32>(colormap_entries);
  png_alloc_size_t size = 0;
  REQUIRE(png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, colormap));
  std::vector<std::uint8_t> out(size);
  REQUIRE(png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, colormap));
  out.resize(size);
  return out;
}

}  // namespace

TEST_CASE("raster construction validates channels and size") {
  CHECK_THROWS_AS(Raster(2, 2, 2), Error);
  CHECK_THROWS_AS(Raster(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
  const Raster r(3, 2, 3);
  CHECK(r.data().size() == 3u * 2u * 3u);
  CHECK(r.pixel_count() == 6u);
}

TEST_CASE("binary mask labels are normalized to 0/1") {
  const BinaryMask m(2, 1, std::vector<std::uint8_t>{0, 255});
  CHECK(m[0] == 0);
  CHECK(m[1] == 1);
  CHECK(m.count() == 1u);
}

TEST_CASE("to_gray") {
  SUBCASE("gray input is returned bit-identical") {
    std::mt19937_64 rng(1);
    const Raster g = testing::random_gray(7, 5, rng);
    CHECK(to_gray(g) == g);
    CHECK(to_gray(to_gray(g)) == g);
  }
  SUBCASE("white maps to 255") {
    const Raster white(1, 1, 3, {255, 255, 255});
    CHECK(to_gray(white).at(0, 0) == 255);
  }
  SUBCASE("weighted sum is rounded") {
    const Raster px(1, 1, 3, {100, 150, 200});
    CHECK(to_gray(px).at(0, 0) == 141);
  }
  SUBCASE("matches the weighted formula on every RGB corner and a sweep") {
    for (int r = 0; r < 256; r += 51)
      for (int g = 0; g < 256; g += 51)
        for (int b = 0; b < 256; b += 51) {
          const Raster px(1, 1, 3, {std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
          const long expected = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
          CHECK(to_gray(px).at(0, 0) == expected);
        }
  }
}

TEST_CASE("png decoding") {
  SUBCASE("1x1 white gray") {
    const std::uint8_t px[] = {255};
    const Raster r = decode_png(craft_png(1, 1, PNG_FORMAT_GRAY, px));
    CHECK(r == Raster(1, 1, 1, {255}));
  }
  SUBCASE("2x2 RGB keeps exact bytes") {
    const std::vector<std::uint8_t> px{255, 0, 0, 0, 255, 0, 0, 0, 255, 0, 0, 0};
    const Raster r = decode_png(craft_png(2, 2, PNG_FORMAT_RGB, px.data()));
    CHECK(r.channels() == 3);
    CHECK(std::vector<std::uint8_t>(r.data().begin(), r.data().end()) == px);
  }
  SUBCASE("alpha is dropped") {
    const std::vector<std::uint8_t> rgba{10, 20, 30, 0, 40, 50, 60, 255};
    const Raster r = decode_png(craft_png(2, 1, PNG_FORMAT_RGBA, rgba.data()));
    CHECK(r == Raster(2, 1, 3, {10, 20, 30, 40, 50, 60}));
    const std::vector<std::uint8_t> ga{77, 128};
    CHECK(decode_png(craft_png(1, 1, PNG_FORMAT_GA, ga.data())) == Raster(1, 1, 1, {77}));
  }
  SUBCASE("palette images are expanded") {
    const std::vector<std::uint8_t> colormap{255, 0, 0, 0, 0, 255};
    const std::vector<std::uint8_t> index{0, 1, 1, 0};
    const Raster r = decode_png(craft_png(2, 2, PNG_FORMAT_RGB_COLORMAP, index.data(), colormap.data(), 2));
    CHECK(r == Raster(2, 2, 3, {255, 0, 0, 0, 0, 255, 0, 0, 255, 255, 0, 0}));
  }
  SUBCASE("16-bit input is rejected") {
    const std::vector<std::uint16_t> px{1000, 65535};
    try {
      decode_png(craft_png(2, 1, PNG_FORMAT_LINEAR_Y, px.data()));
      FAIL("expected UnsupportedFormat");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedFormat);
    }
  }
  SUBCASE("non-PNG bytes are rejected") {
    const std::vector<std::uint8_t> junk{'G', 'I', 'F', '8', '9', 'a', 0, 0, 0};
    try {
      decode_png(junk);
      FAIL("expected UnsupportedFormat");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedFormat);
    }
  }
  SUBCASE("missing file") {
    try {
      load_image("/nonexistent/definitely_missing.png");
      FAIL("expected FileNotFound");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FileNotFound);
    }
  }
}

TEST_CASE("png encode/decode round trip") {
  std::mt19937_64 rng(3);
  const Raster g = testing::random_gray(13, 9, rng);
  CHECK(decode_png(encode_png(g)) == g);
  Raster rgb(5, 4, 3);
  std::uniform_int_distribution<int> v(0, 255);
  for (auto& b : rgb.data()) b = static_cast<std::uint8_t>(v(rng));
  CHECK(decode_png(encode_png(rgb)) == rgb);
}

TEST_CASE("mask I/O") {
  SUBCASE("all-255 PNG is all ones") {
    const std::vector<std::uint8_t> px(12, 255);
    const BinaryMask m = decode_mask(craft_png(4, 3, PNG_FORMAT_GRAY, px.data()));
    CHECK(m.count() == 12u);
  }
  SUBCASE("threshold boundary 127 / 128") {
    const std::vector<std::uint8_t> px{127, 128};
    const BinaryMask m = decode_mask(craft_png(2, 1, PNG_FORMAT_GRAY, px.data()));
    CHECK(m.at(0, 0) == 0);
    CHECK(m.at(1, 0) == 1);
  }
  SUBCASE("save writes 0 and 255, load round-trips") {
    std::mt19937_64 rng(5);
    const BinaryMask m = testing::random_mask(17, 11, rng);
    const auto bytes = encode_mask(m);
    const Raster as_image = decode_png(bytes);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(as_image.data()[i] == (m[i] ? 255 : 0));
    CHECK(decode_mask(bytes) == m);
    const auto dir = testing::scratch_dir("mask_io");
    save_mask(m, dir / "m.png");
    CHECK(load_mask(dir / "m.png") == m);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("binary PNG in {0,255} round-trips byte-exactly through load/save") {
    std::vector<std::uint8_t> px{0, 255, 255, 0, 0, 255};
    const auto original = craft_png(3, 2, PNG_FORMAT_GRAY, px.data());
    const BinaryMask m = decode_mask(original);
    const Raster again = decode_png(encode_mask(m));
    CHECK(std::vector<std::uint8_t>(again.data().begin(), again.data().end()) == px);
  }
}

TEST_CASE("rasterize") {
  SUBCASE("empty annotation is all unknown") {
    const LabelRaster seeds = rasterize({}, 6, 4);
    CHECK(seeds.count(SeedLabel::Unknown) == 24u);
  }
  SUBCASE("radius-1 point paints the 5-pixel disk") {
    Annotation ann{{Stroke{StrokeLabel::Foreground, {{5, 5}}, 1}}};
    const LabelRaster seeds = rasterize(ann, 10, 10);
    std::set<std::pair<int, int>> expected;
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x)
        if ((x - 5) * (x - 5) + (y - 5) * (y - 5) <= 1) expected.insert({x, y});
    CHECK(expected.size() == 5u);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x)
        CHECK((seeds.at(x, y) == SeedLabel::Foreground) == expected.contains({x, y}));
  }
  SUBCASE("later strokes win") {
    Annotation ann{{Stroke{StrokeLabel::Foreground, {{3, 3}}, 2}, Stroke{StrokeLabel::Background, {{3, 3}}, 1}}};
    const LabelRaster seeds = rasterize(ann, 8, 8);
    CHECK(seeds.at(3, 3) == SeedLabel::Background);
    CHECK(seeds.at(5, 3) == SeedLabel::Foreground);
  }
  SUBCASE("out-of-bounds point names stroke and point index") {
    Annotation ann{{Stroke{StrokeLabel::Foreground, {{1, 1}}, 1}, Stroke{StrokeLabel::Background, {{2, 2}, {9, 0}}, 1}}};
    try {
      rasterize(ann, 8, 8);
      FAIL("expected OutOfBounds");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfBounds);
      CHECK(std::string(e.what()).find("stroke 1 point 1") != std::string::npos);
    }
  }
  SUBCASE("seeds never leave the stroke envelope") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> coord(0, 19), rad(1, 4), npts(1, 4), lab(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
      Annotation ann;
      for (int s = 0; s < 3; ++s) {
        Stroke st{lab(rng) ? StrokeLabel::Foreground : StrokeLabel::Background, {}, rad(rng)};
        for (int p = npts(rng); p > 0; --p) st.points.push_back({coord(rng), coord(rng)});
        ann.strokes.push_back(st);
      }
      const LabelRaster seeds = rasterize(ann, 20, 20);
      for (int y = 0; y < 20; ++y) {
        for (int x = 0; x < 20; ++x) {
          if (seeds.at(x, y) == SeedLabel::Unknown) continue;
          // Envelope: within radius of some polyline segment of some stroke.
          bool inside = false;
          for (const auto& st : ann.strokes) {
            for (std::size_t k = 0; k < st.points.size() && !inside; ++k) {
              const auto a = st.points[k];
              const auto b = st.points[k + 1 < st.points.size() ? k + 1 : k];
              const double dx = b.x - a.x, dy = b.y - a.y;
              const double len2 = dx * dx + dy * dy;
              double t = len2 > 0 ? ((x - a.x) * dx + (y - a.y) * dy) / len2 : 0.0;
              t = std::clamp(t, 0.0, 1.0);
              const double px = a.x + t * dx - x, py = a.y + t * dy - y;
              // one extra pixel of slack for the rounding of sampled points
              inside = std::sqrt(px * px + py * py) <= st.radius + 1.0;
            }
          }
          CHECK(inside);
        }
      }
    }
  }
}

TEST_CASE("annotation JSON schema") {
  const std::string text =
      R"({"strokes":[{"label":"fg","radius":3,"points":[[1,2],[3,4]]},{"label":"bg","radius":1,"points":[[0,0]]}]})";
  const Annotation ann = annotation_from_json(text);
  REQUIRE(ann.strokes.size() == 2u);
  CHECK(ann.strokes[0].label == StrokeLabel::Foreground);
  CHECK(ann.strokes[0].radius == 3);
  CHECK(ann.strokes[0].points[1] == Point{3, 4});
  CHECK(ann.strokes[1].label == StrokeLabel::Background);
  CHECK(annotation_from_json(annotation_to_json(ann)) == ann);
  CHECK(annotation_to_json(ann) == text);

  for (const char* bad : {R"({"strokes":[{"label":"maybe","radius":1,"points":[[0,0]]}]})",
                          R"({"strokes":[{"label":"fg","radius":0,"points":[[0,0]]}]})",
                          R"({"strokes":[{"label":"fg","radius":1,"points":[[0]]}]})", R"({"nostrokes":[]})",
                          "not json"}) {
    CHECK_THROWS_AS(annotation_from_json(bad), Error);
  }
}

TEST_CASE("bundled disk_64.png matches the generator") {
  const Raster img = load_image(testing::source_dir() / "data" / "disk_64.png");
  CHECK(img.width() == 64);
  CHECK(img.height() == 64);
  CHECK(img.channels() == 1);
  const auto item = bench::make_synthetic_item(testing::fixture_spec("noiseless_disk"), 0);
  std::size_t fg_pixels = 0;
  for (auto v : img.data()) fg_pixels += v == 200;
  CHECK(fg_pixels == item.gt.count());
  CHECK(img == item.image);
}
