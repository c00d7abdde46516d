#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graspwise/codec.hpp"

namespace graspwise {

enum class Phase {
  kDescribed,
  kAwaitingReview,
  kGrounded,
  kPlanned,
  kExecuted,
  kFailed,
};

std::string_view to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

enum class EventKind {
  kCreated,
  kDescribed,
  kReview,
  kIntervention,
  kGrounded,
  kPlanned,
  kExecuted,
  kFailed,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// One step of a session. `phase` is the phase after the step. Payloads by
/// kind:
///   created       {"scene", "config"}
///   described     {"description"}
///   review        {"description"}
///   intervention  {"text", "description"}
///   grounded      {"description", "grounded"}
///   planned       {"grasps"}            top of the ranking
///   executed      {"grasp", "success"}
///   failed        {"stage", "code", "reason"}
struct SessionEvent {
  std::uint64_t sequence = 0;
  std::string timestamp;
  std::string session_id;
  EventKind kind = EventKind::kCreated;
  Phase phase = Phase::kDescribed;
  Json payload = Json::object();

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

Json encode(const SessionEvent& e);
SessionEvent decode_event(const Json& j, const std::string& where);

/// One event as a single JSON line, without the trailing newline.
std::string to_log_line(const SessionEvent& e);

/// Parses a line-delimited event log. Blank lines are skipped. Throws
/// Error(kParse) naming the offending line.
std::vector<SessionEvent> parse_event_log(std::string_view text);
std::vector<SessionEvent> load_event_log(const std::filesystem::path& path);

}  // namespace graspwise
