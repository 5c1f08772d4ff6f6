#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pursuit {

enum class ErrorKind {
  EmptyRun,
  NonMonotoneTime,
  IrregularSampling,
  InvalidStimulus,
  InvalidParams,
  EmptyMask,
  DegenerateRun,
  TooFewSamples,
  ZeroVariance,
  NoUsableSamples,
  LengthMismatch,
  TooFewSubjects,
  InvalidDf,
  ZeroEffect,
  Unattainable,
  MissingBaseline,
  MissingSession,
  UnknownSubject,
  DegenerateSplit,
  ZeroVarianceFeature,
  SingleClass,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every recoverable failure in the library is reported as a pursuit::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  explicit Error(ErrorKind kind) : std::runtime_error(std::string(to_string(kind))), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pursuit
