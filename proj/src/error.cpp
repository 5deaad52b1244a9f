#include "wnet/error.hpp"

namespace wnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::UnstableStep: return "UnstableStep";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::SingularInnerSolve: return "SingularInnerSolve";
    case ErrorKind::ZeroDisplacement: return "ZeroDisplacement";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

}  // namespace wnet
