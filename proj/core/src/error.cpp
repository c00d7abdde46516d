#include "graspwise/error.hpp"

namespace graspwise {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid_dimension";
    case ErrorCode::kInvalidScene: return "invalid_scene";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kVocabulary: return "vocabulary";
    case ErrorCode::kUnparseable: return "unparseable";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kGroundingFailure: return "grounding_failure";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kEmptyProposals: return "empty_proposals";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kPhase: return "phase";
    case ErrorCode::kGeneration: return "generation";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kReplayDivergence: return "replay_divergence";
  }
  return "unknown";
}

}  // namespace graspwise
