#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"
#include "segbench/raster.hpp"

namespace testing {

inline std::filesystem::path source_dir() {
  return SEGBENCH_SOURCE_DIR;
}

inline segbench::bench::SyntheticSpec fixture_spec(const std::string& name) {
  return segbench::bench::load_synthetic_spec(source_dir() / "configs" / "fixtures" / (name + ".json"));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::random_device device;
  auto dir = std::filesystem::temp_directory_path() / ("segbench_" + name + "_" + std::to_string(device()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline segbench::BinaryMask random_mask(int w, int h, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  segbench::BinaryMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, coin(rng));
  return m;
}

inline segbench::Raster random_gray(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> v(0, 255);
  segbench::Raster r(w, h, 1);
  for (auto& b : r.data()) b = static_cast<std::uint8_t>(v(rng));
  return r;
}

inline segbench::Raster constant_gray(int w, int h, std::uint8_t value) {
  segbench::Raster r(w, h, 1);
  for (auto& b : r.data()) b = value;
  return r;
}

/// Left half `left`, right half `right` (split at w/2).
inline segbench::Raster halves(int w, int h, std::uint8_t left, std::uint8_t right) {
  segbench::Raster r(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) r.at(x, y) = x < w / 2 ? left : right;
  return r;
}

inline std::string read_text(const std::filesystem::path& p) {
  const auto bytes = segbench::read_file_bytes(p);
  return {bytes.begin(), bytes.end()};
}

}  // namespace testing
