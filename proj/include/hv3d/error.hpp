#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hv3d {

enum class ErrorKind {
  MissingFile,
  TruncatedFrame,
  BadGeometry,
  IoError,
  DimensionMismatch,
  PlaneTooSmall,
  DegenerateWeights,
  RankDeficient,
  TooFewRows,
  LengthMismatch,
  ZeroVariance,
  UnknownKind,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; the kind decides the
// CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hv3d
