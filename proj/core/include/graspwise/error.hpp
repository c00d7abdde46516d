#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace graspwise {

/// Machine-readable failure categories. The string form (see to_string) is
/// what the HTTP service and the CLI report.
enum class ErrorCode {
  kInvalidDimension,
  kInvalidScene,
  kNotFound,
  kVocabulary,
  kUnparseable,
  kArity,
  kGroundingFailure,
  kShape,
  kDomain,
  kEmptyProposals,
  kUndefinedMetric,
  kParse,
  kValidation,
  kPhase,
  kGeneration,
  kConfig,
  kIo,
  kReplayDivergence,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace graspwise
