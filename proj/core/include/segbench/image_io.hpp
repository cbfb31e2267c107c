#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segbench/raster.hpp"

namespace segbench {

/// Decodes an 8-bit gray or RGB PNG. Alpha channels are dropped, palettes
/// are expanded to RGB, sub-byte gray is expanded to 8 bits. 16-bit images
/// are rejected with UnsupportedFormat.
Raster decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Raster& img);

Raster load_image(const std::filesystem::path& path);
void save_image(const Raster& img, const std::filesystem::path& path);

/// Gray PNG -> mask with threshold 128 (pixel >= 128 is foreground).
BinaryMask decode_mask(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_mask(const BinaryMask& mask);

BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

BinaryMask threshold_mask(const Raster& gray, std::uint8_t threshold = 128);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace segbench
