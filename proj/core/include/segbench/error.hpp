#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segbench {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  IoError,
  ParseError,
  DimensionMismatch,
  OutOfBounds,
  InvalidArgument,
  NotGrayscale,
  EmptyHistogram,
  NonPositiveSigma,
  InvalidThresholds,
  NoSeeds,
  InsufficientLabels,
  FeatureMismatch,
  MissingSeedClass,
  TooFewSamples,
  DegenerateInit,
  DegenerateGt,
  EmptyRecord,
  EmptyGroundTruth,
  MissingMask,
  EmptyResults,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the HTTP service) can map it to an exit status or a
/// response without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace segbench
