#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alm {

enum class ErrorKind {
  EmptyDesign,
  DimensionMismatch,
  EmptyPool,
  DegenerateCommittee,
  UntrainableInitialSet,
  ConfigConflict,
  PropertyViolation,
  SchemaMismatch,
  ParseError,
  SeriesTooShort,
  SizeConflict,
  DegenerateRange,
  LengthMismatch,
  EmptyInput,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Data-layer and market-layer grouping used by the CLI for exit codes.
bool is_data_error(ErrorKind kind);

}  // namespace alm
