#include "json_codec.hpp"
#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"

namespace segbench::bench {

ExternalMaskManifest load_external_manifest(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  const auto j = detail::parse_json(std::string(bytes.begin(), bytes.end()));
  ExternalMaskManifest manifest;
  try {
    manifest.provider = j.value("provider", std::string("external"));
    for (const auto& [id, file] : j.at("masks").items()) {
      fs::path p = file.get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      manifest.masks.emplace(id, p);
    }
  } catch (const detail::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "bad external mask manifest " + path.string() + ": " + e.what());
  }
  return manifest;
}

BinaryMask ExternalMaskProvider::load(const std::string& image_id) const {
  const auto it = manifest_.masks.find(image_id);
  if (it == manifest_.masks.end()) {
    throw Error(ErrorCode::MissingMask, "provider '" + manifest_.provider + "' has no mask for image " + image_id);
  }
  if (!fs::exists(it->second)) {
    throw Error(ErrorCode::MissingMask, "mask file for image " + image_id + " not found: " + it->second.string());
  }
  return load_mask(it->second);
}

interact::AutoSegmentFn ExternalMaskProvider::segmenter_for(const std::string& image_id) const {
  return [this, image_id](const Raster& img) {
    BinaryMask mask = load(image_id);
    if (mask.width() != img.width() || mask.height() != img.height()) {
      throw Error(ErrorCode::DimensionMismatch, "external mask for image " + image_id + " has wrong dimensions");
    }
    return mask;
  };
}

ExternalMaskProvider load_external_masks(const ExternalMaskManifest& manifest, const Dataset& dataset) {
  ExternalMaskProvider provider(manifest);
  for (const auto& item : dataset.items) {
    const BinaryMask mask = provider.load(item.id);
    if (mask.width() != item.image.width() || mask.height() != item.image.height()) {
      throw Error(ErrorCode::DimensionMismatch, "external mask for image " + item.id + " has wrong dimensions");
    }
  }
  return provider;
}

}  // namespace segbench::bench
