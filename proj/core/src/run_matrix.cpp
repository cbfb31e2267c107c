#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include "hash.hpp"
#include "json_codec.hpp"
#include "segbench/error.hpp"
#include "segbench/harness.hpp"
#include "segbench/image_io.hpp"

namespace segbench::bench {
namespace {

using detail::json;

struct ProtocolName {
  ProtocolKind kind;
  std::string_view canonical;
};

constexpr ProtocolName kProtocols[] = {
    {ProtocolKind::AssistsUserPaint, "algorithm_assists_user:paint"},
    {ProtocolKind::AssistsUserGraphCut, "algorithm_assists_user:graphcut_refine"},
    {ProtocolKind::UserAssistsAlgorithm, "user_assists_algorithm"},
    {ProtocolKind::Hybrid, "hybrid"},
};

std::optional<ProtocolKind> protocol_from_name(std::string name) {
  // Accept "algorithm_assists_user(paint)" as well as the ':' form.
  if (const auto open = name.find('('); open != std::string::npos && name.back() == ')') {
    name = name.substr(0, open) + ":" + name.substr(open + 1, name.size() - open - 2);
  }
  for (const auto& p : kProtocols) {
    if (p.canonical == name) return p.kind;
  }
  return std::nullopt;
}

std::string_view canonical_name(ProtocolKind kind) {
  for (const auto& p : kProtocols) {
    if (p.kind == kind) return p.canonical;
  }
  return "hybrid";
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

ProtocolSpec protocol_from_json(const json& j) {
  ProtocolSpec spec;
  if (j.is_string()) {
    const auto kind = protocol_from_name(j.get<std::string>());
    if (!kind) config_error("unknown protocol '" + j.get<std::string>() + "'");
    spec.kind = *kind;
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key != "id" && key != "kind" && key != "mode" && key != "refiner") {
        config_error("unknown key '" + key + "' in protocol");
      }
    }
    std::string name = detail::get_or(j, "kind", std::string{});
    if (j.contains("mode")) name += ":" + j.at("mode").get<std::string>();
    const auto kind = protocol_from_name(name);
    if (!kind) config_error("unknown protocol '" + name + "'");
    spec.kind = *kind;
    spec.refiner = detail::get_or(j, "refiner", spec.refiner);
    spec.id = detail::get_or(j, "id", std::string{});
  } else {
    config_error("protocol entries are strings or objects");
  }
  if (spec.id.empty()) spec.id = std::string(canonical_name(spec.kind));
  return spec;
}

const AlgorithmSpec* find_algorithm(const RunConfig& cfg, const std::string& id) {
  for (const auto& a : cfg.algorithms) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

/// The seeded algorithm a hybrid protocol re-segments with.
std::optional<AlgorithmSpec> resolve_refiner(const RunConfig& cfg, const ProtocolSpec& proto,
                                             const AlgorithmSpec& alg) {
  if (proto.refiner == "self") {
    if (!is_seed_driven(alg.kind)) return std::nullopt;
    return alg;
  }
  if (const auto* named = find_algorithm(cfg, proto.refiner)) {
    if (!is_seed_driven(named->kind)) return std::nullopt;
    return *named;
  }
  const auto kind = parse_algorithm_kind(proto.refiner);
  if (!kind || !is_seed_driven(*kind)) return std::nullopt;
  return AlgorithmSpec{proto.refiner, *kind, {}};
}

void check_compatibility(const RunConfig& cfg) {
  for (const auto& alg : cfg.algorithms) {
    if (alg.kind == AlgorithmKind::External && alg.params.manifest.empty()) {
      config_error("external algorithm '" + alg.id + "' needs a 'manifest' parameter");
    }
    for (const auto& proto : cfg.protocols) {
      if (proto.kind == ProtocolKind::UserAssistsAlgorithm && !is_seed_driven(alg.kind)) {
        config_error("algorithm '" + alg.id + "' cannot run under user_assists_algorithm: it takes no seeds");
      }
      if (proto.kind == ProtocolKind::Hybrid && !resolve_refiner(cfg, proto, alg)) {
        config_error("protocol '" + proto.id + "' has no seeded refiner for algorithm '" + alg.id + "'");
      }
    }
  }
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t cell) {
  return detail::splitmix64(base ^ cell);
}

struct Cell {
  const AlgorithmSpec* alg;
  const ProtocolSpec* proto;
  const DatasetItem* item;
};

/// Shared, read-only state prepared before any cell runs.
struct MatrixContext {
  const RunConfig& cfg;
  const Dataset& dataset;
  std::map<std::string, ExternalMaskProvider> external;
  std::map<bool, std::vector<ml::FeatureStack>> stacks;  // keyed by spatial flag
};

const std::vector<ml::FeatureStack>& feature_stacks(MatrixContext& ctx, bool spatial) {
  auto it = ctx.stacks.find(spatial);
  if (it != ctx.stacks.end()) return it->second;
  std::vector<ml::FeatureStack> stacks(ctx.dataset.items.size());
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    stacks[i] = ml::extract_features(ctx.dataset.items[i].image, {spatial, 3});
  }
  return ctx.stacks.emplace(spatial, std::move(stacks)).first->second;
}

std::size_t index_of(const Dataset& ds, const DatasetItem* item) {
  return static_cast<std::size_t>(item - ds.items.data());
}

/// Forest trained on every other image's ground truth; with a single image
/// there is nothing to hold out, so the forest learns from the seeds.
interact::Segmenter forest_segmenter(const MatrixContext& ctx, const Cell& cell, std::uint64_t seed) {
  AlgorithmParams params = cell.alg->params;
  params.forest.rng_seed = mix_seed(params.forest.rng_seed, seed);
  if (ctx.dataset.items.size() < 2) {
    return {cell.alg->id, nullptr, make_seeded_segmenter(AlgorithmKind::MlForest, params)};
  }
  const auto& stacks = ctx.stacks.at(params.spatial_features);
  const std::size_t self = index_of(ctx.dataset, cell.item);
  auto automatic = [&ctx, &stacks, params, self, seed](const Raster&) {
    ml::TrainingSet set;
    set.feature_count = stacks[self].feature_count();
    for (std::size_t i = 0; i < stacks.size(); ++i) {
      if (i == self) continue;
      ml::append_mask_samples(set, stacks[i], ctx.dataset.items[i].gt, params.batch_pixels_per_class,
                              mix_seed(seed, i + 1));
    }
    const auto forest = ml::train_forest(set, stacks[self].names, params.forest);
    return ml::predict_forest(forest, stacks[self]).mask;
  };
  return {cell.alg->id, automatic, nullptr};
}

interact::Segmenter make_segmenter(const MatrixContext& ctx, const Cell& cell, std::uint64_t seed) {
  const AlgorithmSpec& alg = *cell.alg;
  AlgorithmParams params = alg.params;
  params.forest.rng_seed = mix_seed(params.forest.rng_seed, seed);
  params.grabcut.rng_seed = mix_seed(params.grabcut.rng_seed, seed);
  switch (alg.kind) {
    case AlgorithmKind::NaiveOtsu:
    case AlgorithmKind::NaiveCanny: return {alg.id, make_automatic_segmenter(alg.kind, params), nullptr};
    case AlgorithmKind::External: return {alg.id, ctx.external.at(alg.id).segmenter_for(cell.item->id), nullptr};
    case AlgorithmKind::MlForest:
      if (cell.proto->kind != ProtocolKind::UserAssistsAlgorithm) return forest_segmenter(ctx, cell, seed);
      [[fallthrough]];
    default: return {alg.id, nullptr, make_seeded_segmenter(alg.kind, params)};
  }
}

SessionRecord run_cell(const MatrixContext& ctx, const Cell& cell) {
  const std::uint64_t seed = cell_seed(ctx.cfg.rng_seed, cell.alg->id, cell.proto->id, cell.item->id);
  SimulatedUserParams user = ctx.cfg.user;
  user.rng_seed = mix_seed(user.rng_seed, seed);
  const interact::Segmenter segmenter = make_segmenter(ctx, cell, seed);
  const Raster& img = cell.item->image;
  const BinaryMask& gt = cell.item->gt;

  SessionRecord record;
  switch (cell.proto->kind) {
    case ProtocolKind::AssistsUserPaint:
      record = interact::run_algorithm_assists_user(segmenter, img, gt, user, interact::RefineMode::Paint,
                                                    ctx.cfg.options);
      break;
    case ProtocolKind::AssistsUserGraphCut:
      record = interact::run_algorithm_assists_user(segmenter, img, gt, user, interact::RefineMode::GraphCutRefine,
                                                    ctx.cfg.options);
      break;
    case ProtocolKind::UserAssistsAlgorithm:
      record = interact::run_user_assists_algorithm(segmenter.seeded, img, gt, user);
      break;
    case ProtocolKind::Hybrid: {
      AlgorithmSpec refiner = *resolve_refiner(ctx.cfg, *cell.proto, *cell.alg);
      refiner.params.forest.rng_seed = mix_seed(refiner.params.forest.rng_seed, seed);
      refiner.params.grabcut.rng_seed = mix_seed(refiner.params.grabcut.rng_seed, seed);
      record = interact::run_hybrid(segmenter, make_seeded_segmenter(refiner.kind, refiner.params), img, gt, user,
                                    ctx.cfg.options);
      break;
    }
  }
  record.image_id = cell.item->id;
  record.algorithm_id = cell.alg->id;
  record.protocol_id = cell.proto->id;
  record.external = cell.alg->kind == AlgorithmKind::External;
  return record;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const fs::path& base_dir) {
  const json j = detail::parse_json(json_text);
  if (!j.is_object()) config_error("run config must be a JSON object");
  static const std::set<std::string> known{"dataset", "algorithms", "protocols", "user", "auto_seed_erosion",
                                           "output_dir", "rng_seed", "threads", "graph"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) config_error("unknown key '" + key + "' in run config");
  }
  auto resolve = [&](const fs::path& p) { return p.is_relative() && !base_dir.empty() ? base_dir / p : p; };

  RunConfig cfg;
  try {
    const json& ds = j.at("dataset");
    if (ds.contains("path")) {
      cfg.dataset_path = resolve(ds.at("path").get<std::string>());
    } else if (ds.contains("synthetic")) {
      cfg.synthetic = parse_synthetic_spec(ds.at("synthetic").dump());
    } else {
      config_error("dataset needs 'path' or 'synthetic'");
    }

    std::set<std::string> ids;
    for (const auto& a : j.at("algorithms")) {
      AlgorithmSpec spec;
      const std::string kind_name = a.at("kind").get<std::string>();
      const auto kind = parse_algorithm_kind(kind_name);
      if (!kind) config_error("unknown algorithm kind '" + kind_name + "'");
      spec.kind = *kind;
      spec.id = a.value("id", kind_name);
      if (!ids.insert(spec.id).second) config_error("duplicate algorithm id '" + spec.id + "'");
      spec.params = detail::algorithm_params_from_json(a.value("params", json::object()));
      if (!spec.params.manifest.empty()) spec.params.manifest = resolve(spec.params.manifest).string();
      cfg.algorithms.push_back(std::move(spec));
    }

    ids.clear();
    for (const auto& p : j.at("protocols")) {
      ProtocolSpec spec = protocol_from_json(p);
      if (!ids.insert(spec.id).second) config_error("duplicate protocol id '" + spec.id + "'");
      cfg.protocols.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed run config: ") + e.what());
  }

  if (j.contains("user")) cfg.user = detail::user_params_from_json(j.at("user"));
  cfg.options.auto_seed_erosion = detail::get_or(j, "auto_seed_erosion", cfg.options.auto_seed_erosion);
  if (cfg.options.auto_seed_erosion < 0) config_error("auto_seed_erosion must be >= 0");
  if (j.contains("graph")) {
    const auto params = detail::algorithm_params_from_json(j.at("graph"));
    cfg.options.graph = params.graph;
  }
  if (j.contains("output_dir")) cfg.output_dir = resolve(j.at("output_dir").get<std::string>());
  cfg.rng_seed = detail::get_or(j, "rng_seed", cfg.rng_seed);
  cfg.threads = detail::get_or(j, "threads", cfg.threads);

  if (cfg.algorithms.empty()) config_error("at least one algorithm is required");
  if (cfg.protocols.empty()) config_error("at least one protocol is required");
  check_compatibility(cfg);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_run_config(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

std::uint64_t cell_seed(std::uint64_t rng_seed, const std::string& algorithm_id, const std::string& protocol_id,
                        const std::string& image_id) {
  std::uint64_t h = detail::splitmix64(rng_seed);
  for (const auto* part : {&algorithm_id, &protocol_id, &image_id}) {
    h = detail::splitmix64(h ^ detail::fnv1a(*part));
  }
  return h;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Quartiles quartiles(const std::vector<double>& values) {
  return {quantile(values, 0.0), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
          quantile(values, 1.0)};
}

RunSummary summarize(std::vector<SessionRecord> records, std::vector<CellFailure> failures) {
  auto key = [](const SessionRecord& r) { return std::tie(r.algorithm_id, r.protocol_id, r.image_id); };
  std::sort(records.begin(), records.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });

  RunSummary summary;
  summary.failures = std::move(failures);
  summary.total_cells = records.size() + summary.failures.size();
  for (std::size_t begin = 0; begin < records.size();) {
    std::size_t end = begin;
    while (end < records.size() && records[end].algorithm_id == records[begin].algorithm_id &&
           records[end].protocol_id == records[begin].protocol_id) {
      ++end;
    }
    SummaryRow row;
    row.algorithm_id = records[begin].algorithm_id;
    row.protocol_id = records[begin].protocol_id;
    row.n_images = static_cast<int>(end - begin);
    std::vector<double> initial, refined, improvement, compute, interaction;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = records[i];
      initial.push_back(r.initial_iou);
      refined.push_back(r.refined_iou);
      improvement.push_back(r.refined_iou - r.initial_iou);
      compute.push_back(r.initial_compute_seconds());
      interaction.push_back(r.interaction_seconds());
      row.external = row.external || r.external;
      if (r.initial_alpha && r.initial_beta) {
        summary.alpha_beta.push_back({r.algorithm_id, r.protocol_id, r.image_id, *r.initial_alpha, *r.initial_beta});
      }
    }
    row.iou_improvement = mean(improvement);
    row.initial_iou_mean = mean(initial);
    row.refined_iou_mean = mean(refined);
    row.compute_s_mean = mean(compute);
    row.interaction_s_mean = mean(interaction);
    row.initial = quartiles(initial);
    row.refined = quartiles(refined);
    summary.rows.push_back(std::move(row));
    begin = end;
  }
  return summary;
}

Dataset resolve_dataset(const RunConfig& cfg) {
  if (cfg.dataset_path) return load_dataset(*cfg.dataset_path);
  if (cfg.synthetic) return make_synthetic_dataset(*cfg.synthetic);
  config_error("run config has no dataset");
}

int worker_count(const RunConfig& cfg) {
  int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SEGBENCH_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(n, 1);
}

MatrixResult run_matrix(const RunConfig& cfg, const Dataset& dataset) {
  if (dataset.items.empty()) config_error("dataset has no images");
  MatrixContext ctx{cfg, dataset, {}, {}};
  for (const auto& alg : cfg.algorithms) {
    if (alg.kind == AlgorithmKind::External) {
      ctx.external.emplace(alg.id, load_external_masks(load_external_manifest(alg.params.manifest), dataset));
    }
    if (alg.kind == AlgorithmKind::MlForest && dataset.items.size() > 1) {
      feature_stacks(ctx, alg.params.spatial_features);
    }
  }

  std::vector<Cell> cells;
  for (const auto& alg : cfg.algorithms) {
    for (const auto& proto : cfg.protocols) {
      for (const auto& item : dataset.items) cells.push_back({&alg, &proto, &item});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.alg->id, a.proto->id, a.item->id) < std::tie(b.alg->id, b.proto->id, b.item->id);
  });

  std::vector<std::optional<SessionRecord>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_cell(ctx, cells[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_workers = std::min<int>(worker_count(cfg), static_cast<int>(cells.size()));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  MatrixResult out;
  std::vector<CellFailure> failures;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (results[i]) {
      out.records.push_back(std::move(*results[i]));
    } else {
      failures.push_back({cells[i].alg->id, cells[i].proto->id, cells[i].item->id, errors[i]});
    }
  }
  out.summary = summarize(out.records, std::move(failures));
  return out;
}

MatrixResult run_matrix(const RunConfig& cfg) {
  return run_matrix(cfg, resolve_dataset(cfg));
}

}  // namespace segbench::bench
