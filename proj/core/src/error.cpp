#include "segbench/error.hpp"

namespace segbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotGrayscale: return "NotGrayscale";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::NoSeeds: return "NoSeeds";
    case ErrorCode::InsufficientLabels: return "InsufficientLabels";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::MissingSeedClass: return "MissingSeedClass";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateInit: return "DegenerateInit";
    case ErrorCode::DegenerateGt: return "DegenerateGt";
    case ErrorCode::EmptyRecord: return "EmptyRecord";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::MissingMask: return "MissingMask";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace segbench
