#include "json_codec.hpp"

#include <set>

#include "segbench/error.hpp"

namespace segbench::detail {
namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

std::string_view kind_name(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::InitialSeeding: return "initial_seeding";
    case InteractionKind::Correction: return "correction";
    case InteractionKind::DirectPaint: return "direct_paint";
  }
  return "correction";
}

InteractionKind kind_from_name(const std::string& name) {
  if (name == "initial_seeding") return InteractionKind::InitialSeeding;
  if (name == "correction") return InteractionKind::Correction;
  if (name == "direct_paint") return InteractionKind::DirectPaint;
  malformed("unknown interaction kind '" + name + "'");
}

opt::GraphCutParams graph_params_from_json(const json& j, opt::GraphCutParams p) {
  reject_unknown(j, {"lambda", "sigma_b", "hist_bins"}, "graph parameters");
  p.lambda = get_or(j, "lambda", p.lambda);
  if (j.contains("sigma_b") && !j.at("sigma_b").is_null()) p.sigma_b = get_or(j, "sigma_b", 0.0);
  p.hist_bins = get_or(j, "hist_bins", p.hist_bins);
  if (p.hist_bins < 2 || p.hist_bins > 256) throw Error(ErrorCode::ConfigError, "hist_bins must be in [2, 256]");
  if (p.sigma_b && *p.sigma_b <= 0.0) throw Error(ErrorCode::ConfigError, "sigma_b must be positive");
  return p;
}

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
}

json to_json(const Annotation& ann) {
  json strokes = json::array();
  for (const auto& s : ann.strokes) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back({p.x, p.y});
    strokes.push_back({{"label", s.label == StrokeLabel::Foreground ? "fg" : "bg"},
                       {"radius", s.radius},
                       {"points", std::move(points)}});
  }
  return {{"strokes", std::move(strokes)}};
}

Annotation annotation_from_json(const json& j) {
  const json& strokes = require(j, "strokes");
  if (!strokes.is_array()) malformed("'strokes' must be an array");
  Annotation ann;
  try {
    for (const auto& s : strokes) {
      Stroke stroke;
      const auto label = require(s, "label").get<std::string>();
      if (label == "fg") {
        stroke.label = StrokeLabel::Foreground;
      } else if (label == "bg") {
        stroke.label = StrokeLabel::Background;
      } else {
        malformed("stroke label must be 'fg' or 'bg'");
      }
      stroke.radius = require(s, "radius").get<int>();
      if (stroke.radius < 1) malformed("stroke radius must be at least 1");
      const json& points = require(s, "points");
      if (!points.is_array() || points.empty()) malformed("stroke needs at least one point");
      for (const auto& p : points) {
        if (!p.is_array() || p.size() != 2) malformed("points are [x, y] pairs");
        stroke.points.push_back({p[0].get<int>(), p[1].get<int>()});
      }
      ann.strokes.push_back(std::move(stroke));
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  return ann;
}

json to_json(const ml::Forest& forest) {
  const auto& p = forest.params;
  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back(
          {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
           {"probability", n.probability}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"params",
           {{"n_trees", p.n_trees},
            {"max_depth", p.max_depth},
            {"min_samples_leaf", p.min_samples_leaf},
            {"features_per_split", p.features_per_split},
            {"rng_seed", p.rng_seed},
            {"bootstrap", p.bootstrap}}},
          {"feature_names", forest.feature_names},
          {"trees", std::move(trees)}};
}

ml::Forest forest_from_json(const json& j) {
  ml::Forest forest;
  try {
    const json& p = require(j, "params");
    forest.params.n_trees = require(p, "n_trees").get<int>();
    forest.params.max_depth = require(p, "max_depth").get<int>();
    forest.params.min_samples_leaf = require(p, "min_samples_leaf").get<int>();
    forest.params.features_per_split = require(p, "features_per_split").get<int>();
    forest.params.rng_seed = require(p, "rng_seed").get<std::uint64_t>();
    forest.params.bootstrap = get_or(p, "bootstrap", true);
    forest.feature_names = require(j, "feature_names").get<std::vector<std::string>>();
    for (const auto& t : require(j, "trees")) {
      ml::DecisionTree tree;
      for (const auto& n : require(t, "nodes")) {
        ml::TreeNode node;
        node.feature = require(n, "feature").get<int>();
        node.threshold = require(n, "threshold").get<double>();
        node.left = require(n, "left").get<int>();
        node.right = require(n, "right").get<int>();
        node.probability = require(n, "probability").get<double>();
        tree.nodes.push_back(node);
      }
      const int size = static_cast<int>(tree.nodes.size());
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= size || node.right >= size)) {
          malformed("tree node references a child out of range");
        }
        if (node.feature >= static_cast<int>(forest.feature_names.size())) malformed("node feature out of range");
      }
      if (tree.nodes.empty()) malformed("empty tree");
      forest.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  return forest;
}

json mask_to_rle(const BinaryMask& mask) {
  json runs = json::array();
  std::uint8_t value = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != value) {
      runs.push_back(run);
      value = mask[i];
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  return {{"width", mask.width()}, {"height", mask.height()}, {"rle", std::move(runs)}};
}

BinaryMask mask_from_rle(const json& j) {
  try {
    const int w = require(j, "width").get<int>();
    const int h = require(j, "height").get<int>();
    if (w <= 0 || h <= 0) malformed("mask dimensions must be positive");
    std::vector<std::uint8_t> labels;
    labels.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    std::uint8_t value = 0;
    for (const auto& run : require(j, "rle")) {
      labels.insert(labels.end(), run.get<std::size_t>(), value);
      value ^= 1;
    }
    if (labels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
      malformed("run lengths do not cover the mask");
    }
    return BinaryMask(w, h, std::move(labels));
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

json to_json(const SessionRecord& r, bool include_timing) {
  json events = json::array();
  for (const auto& e : r.events) {
    events.push_back({{"index", e.index},
                      {"kind", kind_name(e.kind)},
                      {"annotation", to_json(e.annotation)},
                      {"simulated_time", e.simulated_time}});
  }
  json masks = json::array();
  for (const auto& m : r.masks) masks.push_back(mask_to_rle(m));
  json out = {{"image_id", r.image_id},
              {"algorithm_id", r.algorithm_id},
              {"protocol_id", r.protocol_id},
              {"external", r.external},
              {"initial_iou", r.initial_iou},
              {"refined_iou", r.refined_iou},
              {"iou_improvement", r.refined_iou - r.initial_iou},
              {"initial_alpha", r.initial_alpha ? json(*r.initial_alpha) : json(nullptr)},
              {"initial_beta", r.initial_beta ? json(*r.initial_beta) : json(nullptr)},
              {"interaction_seconds", r.interaction_seconds()},
              {"iou_trace", r.iou_trace},
              {"events", std::move(events)},
              {"masks", std::move(masks)}};
  if (include_timing) out["compute_times"] = r.compute_times;
  return out;
}

SessionRecord record_from_json(const json& j) {
  SessionRecord r;
  try {
    r.image_id = require(j, "image_id").get<std::string>();
    r.algorithm_id = require(j, "algorithm_id").get<std::string>();
    r.protocol_id = require(j, "protocol_id").get<std::string>();
    r.external = get_or(j, "external", false);
    r.initial_iou = require(j, "initial_iou").get<double>();
    r.refined_iou = require(j, "refined_iou").get<double>();
    if (j.contains("initial_alpha") && !j.at("initial_alpha").is_null()) r.initial_alpha = j.at("initial_alpha").get<double>();
    if (j.contains("initial_beta") && !j.at("initial_beta").is_null()) r.initial_beta = j.at("initial_beta").get<double>();
    r.iou_trace = require(j, "iou_trace").get<std::vector<double>>();
    for (const auto& e : require(j, "events")) {
      InteractionEvent event;
      event.index = require(e, "index").get<int>();
      event.kind = kind_from_name(require(e, "kind").get<std::string>());
      event.annotation = annotation_from_json(require(e, "annotation"));
      event.simulated_time = require(e, "simulated_time").get<double>();
      r.events.push_back(std::move(event));
    }
    for (const auto& m : require(j, "masks")) r.masks.push_back(mask_from_rle(m));
    if (j.contains("compute_times")) r.compute_times = j.at("compute_times").get<std::vector<double>>();
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  return r;
}

json to_json(const metrics::MetricsSnapshot& s) {
  json out = json::object();
  if (s.iou) out["iou"] = *s.iou;
  if (s.alpha) out["alpha"] = *s.alpha;
  if (s.beta) out["beta"] = *s.beta;
  out["compute_seconds"] = s.compute_seconds;
  out["interaction_seconds"] = s.interaction_seconds;
  return out;
}

metrics::MetricsSnapshot metrics_from_json(const json& j) {
  metrics::MetricsSnapshot s;
  if (j.contains("iou")) s.iou = j.at("iou").get<double>();
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) s.beta = j.at("beta").get<double>();
  s.compute_seconds = get_or(j, "compute_seconds", 0.0);
  s.interaction_seconds = get_or(j, "interaction_seconds", 0.0);
  return s;
}

AlgorithmParams algorithm_params_from_json(const json& j) {
  AlgorithmParams p;
  if (j.is_null()) return p;
  reject_unknown(j,
                 {"sigma", "low", "high", "closing_iterations", "tau", "n_trees", "max_depth", "min_samples_leaf",
                  "features_per_split", "rng_seed", "bootstrap", "spatial_features", "pixels_per_class", "lambda",
                  "sigma_b", "hist_bins", "components", "max_rounds", "em_iterations", "manifest"},
                 "algorithm parameters");
  p.canny_sigma = get_or(j, "sigma", p.canny_sigma);
  p.canny_low = get_or(j, "low", p.canny_low);
  p.canny_high = get_or(j, "high", p.canny_high);
  p.closing_iterations = get_or(j, "closing_iterations", p.closing_iterations);
  p.region_tau = get_or(j, "tau", p.region_tau);
  p.forest.n_trees = get_or(j, "n_trees", p.forest.n_trees);
  p.forest.max_depth = get_or(j, "max_depth", p.forest.max_depth);
  p.forest.min_samples_leaf = get_or(j, "min_samples_leaf", p.forest.min_samples_leaf);
  p.forest.features_per_split = get_or(j, "features_per_split", p.forest.features_per_split);
  p.forest.bootstrap = get_or(j, "bootstrap", p.forest.bootstrap);
  p.spatial_features = get_or(j, "spatial_features", p.spatial_features);
  p.batch_pixels_per_class = get_or(j, "pixels_per_class", p.batch_pixels_per_class);
  json graph = json::object();
  for (const char* key : {"lambda", "sigma_b", "hist_bins"}) {
    if (j.contains(key)) graph[key] = j.at(key);
  }
  p.graph = graph_params_from_json(graph, p.graph);
  p.grabcut.graph = p.graph;
  p.grabcut.components = get_or(j, "components", p.grabcut.components);
  p.grabcut.max_rounds = get_or(j, "max_rounds", p.grabcut.max_rounds);
  p.grabcut.em_iterations = get_or(j, "em_iterations", p.grabcut.em_iterations);
  const auto seed = get_or(j, "rng_seed", std::uint64_t{0});
  p.forest.rng_seed = seed;
  p.grabcut.rng_seed = seed;
  p.manifest = get_or(j, "manifest", std::string{});

  if (p.canny_sigma <= 0.0) throw Error(ErrorCode::ConfigError, "sigma must be positive");
  if (p.canny_low > p.canny_high) throw Error(ErrorCode::ConfigError, "low must not exceed high");
  if (p.closing_iterations < 0) throw Error(ErrorCode::ConfigError, "closing_iterations must be >= 0");
  if (p.region_tau < 0.0) throw Error(ErrorCode::ConfigError, "tau must be >= 0");
  if (p.forest.n_trees < 1 || p.forest.max_depth < 1 || p.forest.min_samples_leaf < 1) {
    throw Error(ErrorCode::ConfigError, "forest sizes must be positive");
  }
  if (p.grabcut.components < 1 || p.grabcut.max_rounds < 1) {
    throw Error(ErrorCode::ConfigError, "grabcut components and rounds must be positive");
  }
  if (p.batch_pixels_per_class < 1) throw Error(ErrorCode::ConfigError, "pixels_per_class must be positive");
  return p;
}

SimulatedUserParams user_params_from_json(const json& j, SimulatedUserParams p) {
  if (j.is_null()) return p;
  reject_unknown(j, {"brush_radius", "seconds_per_interaction", "max_interactions", "target_iou", "rng_seed"},
                 "simulated user");
  p.brush_radius = get_or(j, "brush_radius", p.brush_radius);
  p.seconds_per_interaction = get_or(j, "seconds_per_interaction", p.seconds_per_interaction);
  p.max_interactions = get_or(j, "max_interactions", p.max_interactions);
  p.target_iou = get_or(j, "target_iou", p.target_iou);
  p.rng_seed = get_or(j, "rng_seed", p.rng_seed);
  if (p.brush_radius < 1) throw Error(ErrorCode::ConfigError, "brush_radius must be >= 1");
  if (p.max_interactions < 0) throw Error(ErrorCode::ConfigError, "max_interactions must be >= 0");
  if (!(p.target_iou > 0.0 && p.target_iou <= 1.0)) throw Error(ErrorCode::ConfigError, "target_iou must be in (0, 1]");
  if (p.seconds_per_interaction < 0.0) throw Error(ErrorCode::ConfigError, "seconds_per_interaction must be >= 0");
  return p;
}

}  // namespace segbench::detail

namespace segbench {

std::string record_to_json(const SessionRecord& record, bool include_timing) {
  return detail::to_json(record, include_timing).dump(2);
}

SessionRecord record_from_json(const std::string& text) {
  return detail::record_from_json(detail::parse_json(text));
}

}  // namespace segbench
