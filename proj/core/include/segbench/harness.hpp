#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segbench/algorithms.hpp"
#include "segbench/interaction.hpp"
#include "segbench/raster.hpp"

namespace segbench::bench {

namespace fs = std::filesystem;

// ---- datasets --------------------------------------------------------------

enum class ShapeKind { Disk, Rectangle, Blob };

struct SyntheticSpec {
  int n_images = 10;
  int size = 64;
  std::vector<ShapeKind> shapes{ShapeKind::Disk, ShapeKind::Rectangle, ShapeKind::Blob};
  bool color = false;
  int fg_gray = 200;
  int bg_gray = 30;
  std::array<int, 3> fg_rgb{200, 40, 40};
  std::array<int, 3> bg_rgb{30, 30, 120};
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 1;
};

/// Geometry of a generated shape, in pixel coordinates. A pixel (x, y) is
/// inside a disk when (x - cx)^2 + (y - cy)^2 <= radius^2.
struct ShapeInfo {
  ShapeKind kind = ShapeKind::Disk;
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;       // disk and blob base radius
  int rect_x0 = 0, rect_y0 = 0, rect_w = 0, rect_h = 0;
};

struct DatasetItem {
  std::string id;
  Raster image;
  BinaryMask gt;
  std::optional<ShapeInfo> shape;
};

struct Dataset {
  std::vector<DatasetItem> items;
  const DatasetItem* find(const std::string& id) const;
};

std::string_view to_string(ShapeKind kind) noexcept;
SyntheticSpec parse_synthetic_spec(const std::string& json_text);
SyntheticSpec load_synthetic_spec(const fs::path& path);

/// Image `index` of the dataset; depends only on (spec, index).
DatasetItem make_synthetic_item(const SyntheticSpec& spec, int index);
Dataset make_synthetic_dataset(const SyntheticSpec& spec);

/// Writes img_XXX.png, gt_XXX.png and manifest.json. Throws IoError.
void generate_synthetic_dataset(const SyntheticSpec& spec, const fs::path& out_dir);

/// Reads manifest.json when present, otherwise every img_*.png with a
/// matching gt_*.png. Image ids are the shared suffix ("000", ...).
Dataset load_dataset(const fs::path& dir);

// ---- external masks --------------------------------------------------------

struct ExternalMaskManifest {
  std::string provider;
  std::map<std::string, fs::path> masks;  // image id -> mask file
};

/// JSON: {"provider": "unet", "masks": {"000": "masks/000.png", ...}}.
/// Relative paths resolve against the manifest's directory.
ExternalMaskManifest load_external_manifest(const fs::path& path);

class ExternalMaskProvider {
 public:
  ExternalMaskProvider() = default;
  explicit ExternalMaskProvider(ExternalMaskManifest manifest) : manifest_(std::move(manifest)) {}

  const std::string& provider() const noexcept { return manifest_.provider; }
  /// Reads the mask file for `image_id`; throws MissingMask.
  BinaryMask load(const std::string& image_id) const;
  /// A segmenter that reloads the file on each call, so its measured
  /// compute time is the file-load time. Rejects images of another size.
  interact::AutoSegmentFn segmenter_for(const std::string& image_id) const;

 private:
  ExternalMaskManifest manifest_;
};

/// Checks that every dataset image has a readable mask of matching size
/// (MissingMask / DimensionMismatch) before anything runs.
ExternalMaskProvider load_external_masks(const ExternalMaskManifest& manifest, const Dataset& dataset);

// ---- run configuration -----------------------------------------------------

struct AlgorithmSpec {
  std::string id;
  AlgorithmKind kind = AlgorithmKind::NaiveOtsu;
  AlgorithmParams params;
};

enum class ProtocolKind { AssistsUserPaint, AssistsUserGraphCut, UserAssistsAlgorithm, Hybrid };

struct ProtocolSpec {
  std::string id;
  ProtocolKind kind = ProtocolKind::Hybrid;
  /// Seeded algorithm used for re-segmentation in hybrid: an algorithm kind
  /// name, or "self" for the cell's own algorithm.
  std::string refiner = "graphcut";
};

struct RunConfig {
  std::optional<fs::path> dataset_path;
  std::optional<SyntheticSpec> synthetic;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<ProtocolSpec> protocols;
  SimulatedUserParams user;
  interact::ProtocolOptions options;
  fs::path output_dir;
  std::uint64_t rng_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

/// Relative paths inside the config resolve against base_dir. Throws
/// ConfigError for schema violations, duplicate ids, or pairs that cannot
/// run (e.g. user_assists_algorithm with an automatic-only algorithm).
RunConfig parse_run_config(const std::string& json_text, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

/// Per-cell seed: a hash of (rng_seed, algorithm id, protocol id, image id).
std::uint64_t cell_seed(std::uint64_t rng_seed, const std::string& algorithm_id, const std::string& protocol_id,
                        const std::string& image_id);

// ---- matrix ----------------------------------------------------------------

/// Linear interpolation between closest ranks: position (n - 1) * q over
/// the sorted values.
double quantile(std::vector<double> values, double q);

struct Quartiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
Quartiles quartiles(const std::vector<double>& values);

struct SummaryRow {
  std::string algorithm_id;
  std::string protocol_id;
  int n_images = 0;
  double iou_improvement = 0;
  double initial_iou_mean = 0;
  double refined_iou_mean = 0;
  double compute_s_mean = 0;
  double interaction_s_mean = 0;
  bool external = false;
  Quartiles initial;
  Quartiles refined;
};

struct AlphaBetaPoint {
  std::string algorithm_id;
  std::string protocol_id;
  std::string image_id;
  double alpha = 0;
  double beta = 0;
};

struct CellFailure {
  std::string algorithm_id;
  std::string protocol_id;
  std::string image_id;
  std::string error;
};

struct RunSummary {
  std::vector<SummaryRow> rows;
  std::vector<AlphaBetaPoint> alpha_beta;
  std::vector<CellFailure> failures;
  std::size_t total_cells = 0;
};

struct MatrixResult {
  std::vector<SessionRecord> records;  // sorted by (algorithm, protocol, image)
  RunSummary summary;
};

/// Deterministic fold over records sorted by (algorithm, protocol, image).
RunSummary summarize(std::vector<SessionRecord> records, std::vector<CellFailure> failures = {});

Dataset resolve_dataset(const RunConfig& cfg);
/// Worker count from cfg.threads, capped by SEGBENCH_THREADS.
int worker_count(const RunConfig& cfg);

/// Validates external manifests before any cell runs; per-cell errors are
/// collected into summary.failures.
MatrixResult run_matrix(const RunConfig& cfg, const Dataset& dataset);
MatrixResult run_matrix(const RunConfig& cfg);

// ---- reports ---------------------------------------------------------------

/// summary.csv, summary.json, records/*.json, boxplot_initial.csv,
/// boxplot_refined.csv, alpha_beta.csv. Throws EmptyResults on no records.
void export_reports(const std::vector<SessionRecord>& records, const RunSummary& summary, const fs::path& out_dir);

std::string summary_csv(const RunSummary& summary);
std::vector<SummaryRow> parse_summary_csv(const std::string& text);
std::string summary_json(const RunSummary& summary);

struct EvalRow {
  std::string file;
  double iou = 0;
  double alpha = 0;
  double beta = 0;
};

/// Pairs *.png masks by file name; masks without a partner are reported as
/// MissingMask.
std::vector<EvalRow> evaluate_directories(const fs::path& gt_dir, const fs::path& pred_dir);
std::string eval_csv(const std::vector<EvalRow>& rows);

}  // namespace segbench::bench
