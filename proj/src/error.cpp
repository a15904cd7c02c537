#include "tslab/error.hpp"

namespace tslab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::domain: return "domain";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::scale_exceeded: return "scale-exceeded";
    case ErrorCode::numeric_degeneracy: return "numeric-degeneracy";
    case ErrorCode::classification: return "classification";
    case ErrorCode::near_edge: return "near-edge";
    case ErrorCode::edge_singularity: return "edge-singularity";
    case ErrorCode::refinement: return "refinement";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::stability: return "stability";
    case ErrorCode::domain_size: return "domain-size";
  }
  return "unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + " error: " + what);
}

}  // namespace tslab
