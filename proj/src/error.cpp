#include "alm/error.hpp"

namespace alm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyDesign: return "EmptyDesign";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::DegenerateCommittee: return "DegenerateCommittee";
    case ErrorKind::UntrainableInitialSet: return "UntrainableInitialSet";
    case ErrorKind::ConfigConflict: return "ConfigConflict";
    case ErrorKind::PropertyViolation: return "PropertyViolation";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::SizeConflict: return "SizeConflict";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_data_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaMismatch:
    case ErrorKind::ParseError:
    case ErrorKind::SeriesTooShort:
    case ErrorKind::SizeConflict:
    case ErrorKind::DegenerateRange:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

}  // namespace alm
