#include "emenc/error.hpp"

namespace emenc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::unsupported_geometry: return "unsupported-geometry";
    case ErrorKind::invalid_material: return "invalid-material";
    case ErrorKind::invalid_pulse: return "invalid-pulse";
    case ErrorKind::degenerate_pulse: return "degenerate-pulse";
    case ErrorKind::instability: return "instability";
    case ErrorKind::dependency: return "dependency";
    case ErrorKind::incompatible: return "incompatible";
    case ErrorKind::unsupported_medium: return "unsupported-medium";
    case ErrorKind::wrong_branch: return "wrong-branch";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::no_decay: return "no-decay";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::staleness: return "staleness";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::geometry:
    case ErrorKind::unsupported_geometry:
      return 2;
    case ErrorKind::staleness:
    case ErrorKind::dependency:
      return 3;
    case ErrorKind::no_decay:
    case ErrorKind::insufficient_data:
      return 4;
    case ErrorKind::accuracy:
    case ErrorKind::instability:
      return 5;
    default:
      return 1;
  }
}

}  // namespace emenc
