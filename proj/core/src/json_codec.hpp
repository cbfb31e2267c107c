#pragma once

#include <string>

#include <json.hpp>

#include "segbench/algorithms.hpp"
#include "segbench/annotation.hpp"
#include "segbench/error.hpp"
#include "segbench/forest.hpp"
#include "segbench/interaction.hpp"
#include "segbench/metrics.hpp"

namespace segbench::detail {

using json = nlohmann::ordered_json;

/// Throws ParseError with the parser's message.
json parse_json(const std::string& text);

json to_json(const Annotation& ann);
Annotation annotation_from_json(const json& j);

json to_json(const ml::Forest& forest);
ml::Forest forest_from_json(const json& j);

/// Run-length encoding starting with a background run.
json mask_to_rle(const BinaryMask& mask);
BinaryMask mask_from_rle(const json& j);

json to_json(const SessionRecord& record, bool include_timing);
SessionRecord record_from_json(const json& j);

json to_json(const metrics::MetricsSnapshot& snapshot);
metrics::MetricsSnapshot metrics_from_json(const json& j);

AlgorithmParams algorithm_params_from_json(const json& j);
SimulatedUserParams user_params_from_json(const json& j, SimulatedUserParams base = {});

/// Typed field access; ConfigError names the key on a type mismatch.
template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).template get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace segbench::detail
