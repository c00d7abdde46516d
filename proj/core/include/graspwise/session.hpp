#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "graspwise/codec.hpp"
#include "graspwise/events.hpp"
#include "graspwise/grounding.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/noise.hpp"
#include "graspwise/planner.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

struct SessionConfig {
  std::uint64_t seed = 0;
  /// Self-explanation error rate.
  double epsilon = 0.0;
  /// Grounding, surface and angle noise. describe_error_rate and seed are
  /// unused here.
  NoiseConfig noise;
  PlannerConfig planner;
  /// Replaces the generated self-explanation with this text (parsed with the
  /// default lexicon). For scripted episodes.
  std::optional<std::string> forced_description;
  /// Ranked grasps kept in the state and the log.
  std::size_t keep_grasps = 10;

  /// Throws Error(kConfig).
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

Json encode(const SessionConfig& c);
SessionConfig decode_session_config(const Json& j, const std::string& where);

struct SessionFailure {
  std::string stage;  // "ground" or "plan"
  std::string code;
  std::string reason;

  friend bool operator==(const SessionFailure&, const SessionFailure&) = default;
};

struct SessionState {
  std::string id;
  Scene scene;
  SessionConfig config;
  Phase phase = Phase::kDescribed;
  std::optional<Description> description;
  std::optional<GroundedObject> grounded;
  std::vector<ScoredGrasp> ranking;
  std::optional<bool> success;
  std::optional<SessionFailure> failure;
  std::size_t interventions = 0;
  std::size_t ground_attempts = 0;
  std::vector<SessionEvent> history;
};

/// Full state, history included. Equal states dump to identical text.
Json to_json(const SessionState& s);

/// Render data for a viewer: objects with boxes and surface flags, the
/// canonical relations, the description, the grounded object and the grasp
/// overlay with rectangle corners.
Json view_json(const SessionState& s);

/// Timestamps and event delivery. The sink sees every event right after it
/// is appended to the history; a throwing sink aborts the operation.
struct EventContext {
  std::function<std::string()> clock;
  std::function<void(const SessionEvent&)> sink;
};

/// UTC wall clock, ISO 8601 with milliseconds.
std::string utc_timestamp();

/// Validates the scene, produces the self-explanation (oracle description,
/// then corruption with rate epsilon, or the forced text) and stops at
/// AWAITING_REVIEW. Throws Error(kInvalidScene) with one detail per issue.
SessionState start_session(std::string id, const Scene& scene,
                           const SessionConfig& config, const EventContext& ctx);

/// Operator correction from AWAITING_REVIEW or FAILED. On success the text
/// becomes the HUMAN description and the phase returns to DESCRIBED. Parse
/// failures throw Error(kUnparseable | kArity) and leave the state untouched;
/// other phases throw Error(kPhase).
void intervene(SessionState& s, std::string_view text, const EventContext& ctx);

/// Advances one stage. DESCRIBED and AWAITING_REVIEW ground the current
/// description (approval without correction); GROUNDED plans; PLANNED
/// executes, succeeding iff the top grasp is correct. Grounding failures and
/// empty rankings move to FAILED. Other phases throw Error(kPhase).
void step(SessionState& s, const EventContext& ctx);

/// Re-runs a logged episode: starts from the logged scene and config, then
/// applies the logged interventions and steps with the logged timestamps.
/// Every produced event must match the logged one; throws
/// Error(kReplayDivergence) otherwise and Error(kParse) for logs that do not
/// describe a single episode.
SessionState replay(const std::vector<SessionEvent>& events);

/// Thread-safe session registry. Mutations of one session are serialized;
/// different sessions run concurrently. With a log directory every event is
/// appended to <dir>/<id>.jsonl and flushed before the call returns.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::filesystem::path> log_dir = std::nullopt,
                          std::function<std::string()> clock = utc_timestamp);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Returns the new session's state as JSON.
  Json create(const Scene& scene, const SessionConfig& config);
  Json get(const std::string& id) const;
  Json intervene(const std::string& id, std::string_view text);
  Json step(const std::string& id);
  Json view(const std::string& id) const;
  /// The session's events, one JSON line each.
  std::string log(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;
  Json mutate(const std::string& id, const std::function<void(SessionState&, const EventContext&)>& fn);

  std::optional<std::filesystem::path> log_dir_;
  std::function<std::string()> clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace graspwise
