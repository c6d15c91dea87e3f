#pragma once

#include <stdexcept>
#include <string>

namespace cvboost {

// Every failure the library reports, tagged so callers (and the CLI exit-code
// mapping) can tell configuration mistakes from bad data or bad model files.
enum class Errc {
  // ingestion
  IoError,
  MalformedCsv,
  MalformedSchema,
  MissingColumn,
  UnparseableNumeric,
  MissingValue,
  NonBinaryTarget,
  TooFewRows,
  // tree
  EmptyNode,
  DegenerateFolds,
  FeatureCountMismatch,
  // boosting
  DegenerateTarget,
  WrongLoss,
  WrongMetric,
  IncompatibleVersion,
  MalformedModel,
  // importance
  MetricIncompatible,
  NegativeInput,
  // experiments
  CardinalityMismatch,
  UnknownFeature,
  // cli / config
  InvalidConfig,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Config errors map to CLI exit code 2; everything else is a data/model
// error and maps to exit code 3.
inline bool is_config_error(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::WrongLoss:
    case Errc::WrongMetric:
    case Errc::MetricIncompatible:
    case Errc::NegativeInput:
      return true;
    default:
      return false;
  }
}

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cvboost
