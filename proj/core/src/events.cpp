#include "graspwise/events.hpp"

#include <fstream>
#include <sstream>

#include "graspwise/error.hpp"

namespace graspwise {

namespace {

constexpr std::pair<Phase, std::string_view> kPhaseNames[] = {
    {Phase::kDescribed, "DESCRIBED"},     {Phase::kAwaitingReview, "AWAITING_REVIEW"},
    {Phase::kGrounded, "GROUNDED"},       {Phase::kPlanned, "PLANNED"},
    {Phase::kExecuted, "EXECUTED"},       {Phase::kFailed, "FAILED"},
};

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::kCreated, "created"},       {EventKind::kDescribed, "described"},
    {EventKind::kReview, "review"},         {EventKind::kIntervention, "intervention"},
    {EventKind::kGrounded, "grounded"},     {EventKind::kPlanned, "planned"},
    {EventKind::kExecuted, "executed"},     {EventKind::kFailed, "failed"},
};

}  // namespace

std::string_view to_string(Phase p) {
  for (const auto& [value, name] : kPhaseNames) {
    if (value == p) return name;
  }
  return "FAILED";
}

std::optional<Phase> phase_from_string(std::string_view s) {
  for (const auto& [value, name] : kPhaseNames) {
    if (name == s) return value;
  }
  return std::nullopt;
}

std::string_view to_string(EventKind k) {
  for (const auto& [value, name] : kKindNames) {
    if (value == k) return name;
  }
  return "failed";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (const auto& [value, name] : kKindNames) {
    if (name == s) return value;
  }
  return std::nullopt;
}

Json encode(const SessionEvent& e) {
  Json j;
  j["seq"] = e.sequence;
  j["timestamp"] = e.timestamp;
  j["session"] = e.session_id;
  j["kind"] = std::string(to_string(e.kind));
  j["phase"] = std::string(to_string(e.phase));
  j["payload"] = e.payload;
  return j;
}

SessionEvent decode_event(const Json& j, const std::string& where) {
  codec::object(j, where);
  SessionEvent e;
  e.sequence = codec::unsigned_integer(codec::field(j, "seq", where), where + ".seq");
  e.timestamp = codec::string(codec::field(j, "timestamp", where), where + ".timestamp");
  e.session_id = codec::string(codec::field(j, "session", where), where + ".session");
  const auto kind = codec::string(codec::field(j, "kind", where), where + ".kind");
  const auto k = event_kind_from_string(kind);
  if (!k) throw Error(ErrorCode::kParse, where + ".kind: unknown event kind '" + kind + "'");
  e.kind = *k;
  const auto phase = codec::string(codec::field(j, "phase", where), where + ".phase");
  const auto p = phase_from_string(phase);
  if (!p) throw Error(ErrorCode::kParse, where + ".phase: unknown phase '" + phase + "'");
  e.phase = *p;
  e.payload = codec::object(codec::field(j, "payload", where), where + ".payload");
  return e;
}

std::string to_log_line(const SessionEvent& e) { return encode(e).dump(); }

std::vector<SessionEvent> parse_event_log(std::string_view text) {
  std::vector<SessionEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& err) {
      throw Error(ErrorCode::kParse, where + ": " + err.what());
    }
    events.push_back(decode_event(j, where));
  }
  return events;
}

std::vector<SessionEvent> load_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open event log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_event_log(buf.str());
}

}  // namespace graspwise
