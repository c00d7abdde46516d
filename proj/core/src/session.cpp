#include "graspwise/session.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "graspwise/error.hpp"
#include "graspwise/eval.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

void SessionConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kConfig, "epsilon must be in [0, 1]");
  }
  if (keep_grasps < 1) throw Error(ErrorCode::kConfig, "keep_grasps must be >= 1");
  noise.validate();
  planner.validate();
}

Json encode(const SessionConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["noise"] = encode(c.noise);
  j["planner"] = encode(c.planner);
  j["forced_description"] =
      c.forced_description ? Json(*c.forced_description) : Json(nullptr);
  j["keep_grasps"] = c.keep_grasps;
  return j;
}

SessionConfig decode_session_config(const Json& j, const std::string& where) {
  codec::object(j, where);
  SessionConfig c;
  if (const Json* v = codec::optional_field(j, "seed")) {
    c.seed = codec::unsigned_integer(*v, where + ".seed");
  }
  if (const Json* v = codec::optional_field(j, "epsilon")) {
    c.epsilon = codec::number(*v, where + ".epsilon");
  }
  if (const Json* v = codec::optional_field(j, "noise")) {
    c.noise = decode_noise(*v, where + ".noise");
  }
  if (const Json* v = codec::optional_field(j, "planner")) {
    c.planner = decode_planner(*v, where + ".planner");
  }
  if (const Json* v = codec::optional_field(j, "forced_description"); v && !v->is_null()) {
    c.forced_description = codec::string(*v, where + ".forced_description");
  }
  if (const Json* v = codec::optional_field(j, "keep_grasps")) {
    c.keep_grasps = codec::unsigned_integer(*v, where + ".keep_grasps");
  }
  c.validate();
  return c;
}

namespace {

Json optional_json(const std::optional<Description>& d) {
  return d ? encode(*d) : Json(nullptr);
}

void emit(SessionState& s, EventKind kind, Phase phase, Json payload,
          const EventContext& ctx) {
  SessionEvent e;
  e.sequence = s.history.empty() ? 1 : s.history.back().sequence + 1;
  e.timestamp = ctx.clock ? ctx.clock() : utc_timestamp();
  e.session_id = s.id;
  e.kind = kind;
  e.phase = phase;
  e.payload = std::move(payload);
  s.history.push_back(e);
  s.phase = phase;
  if (ctx.sink) ctx.sink(s.history.back());
}

void fail(SessionState& s, std::string stage, const Error& err, const EventContext& ctx) {
  s.failure = SessionFailure{std::move(stage), std::string(to_string(err.code())),
                             err.what()};
  Json p;
  p["stage"] = s.failure->stage;
  p["code"] = s.failure->code;
  p["reason"] = s.failure->reason;
  emit(s, EventKind::kFailed, Phase::kFailed, std::move(p), ctx);
}

void ground_stage(SessionState& s, const EventContext& ctx) {
  const std::uint64_t seed = derive_seed(s.config.seed, streams::kGround, s.ground_attempts);
  ++s.ground_attempts;
  try {
    GroundedObject g = s.description
                           ? noisy_ground(s.scene, *s.description,
                                          s.config.noise.ground_error_rate, seed)
                           : ground_sole_object(s.scene);
    s.grounded = g;
    s.failure.reset();
    Json p;
    p["description"] = optional_json(s.description);
    p["grounded"] = encode(g);
    emit(s, EventKind::kGrounded, Phase::kGrounded, std::move(p), ctx);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kGroundingFailure) throw;
    s.grounded.reset();
    fail(s, "ground", err, ctx);
  }
}

void plan_stage(SessionState& s, const EventContext& ctx) {
  std::vector<ScoredGrasp> ranking;
  try {
    const auto proposals =
        gen_proposals(s.scene, derive_seed(s.config.seed, streams::kProposals),
                      s.config.planner);
    ranking = plan_grasps(s.scene, proposals, s.grounded->region, s.grounded->object_id,
                          s.config.noise, derive_seed(s.config.seed, streams::kScoring),
                          s.config.planner);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kEmptyProposals) throw;
    fail(s, "plan", err, ctx);
    return;
  }
  if (ranking.empty()) {
    fail(s, "plan",
         Error(ErrorCode::kEmptyProposals,
               "no proposal overlaps both an annotated grasp and the grounded object"),
         ctx);
    return;
  }
  if (ranking.size() > s.config.keep_grasps) ranking.resize(s.config.keep_grasps);
  s.ranking = std::move(ranking);
  Json grasps = Json::array();
  for (const auto& g : s.ranking) grasps.push_back(encode(g));
  Json p;
  p["grasps"] = std::move(grasps);
  emit(s, EventKind::kPlanned, Phase::kPlanned, std::move(p), ctx);
}

void execute_stage(SessionState& s, const EventContext& ctx) {
  const ScoredGrasp& top = s.ranking.front();
  s.success = is_correct(top, s.scene);
  Json p;
  p["grasp"] = encode(top);
  p["success"] = *s.success;
  emit(s, EventKind::kExecuted, Phase::kExecuted, std::move(p), ctx);
}

}  // namespace

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

SessionState start_session(std::string id, const Scene& scene,
                           const SessionConfig& config, const EventContext& ctx) {
  config.validate();
  const auto issues = validate(scene, &Vocabulary::default_vocabulary());
  if (!issues.empty()) {
    std::vector<std::string> details;
    for (const auto& i : issues) details.push_back(i.code + ": " + i.message);
    throw Error(ErrorCode::kInvalidScene, "scene '" + scene.id + "' is invalid",
                std::move(details));
  }
  if (scene.objects.empty()) {
    throw Error(ErrorCode::kInvalidScene, "scene '" + scene.id + "' has no objects");
  }

  SessionState s;
  s.id = std::move(id);
  s.scene = scene;
  s.config = config;

  const auto oracle = describe_target(scene, derive_seed(config.seed, streams::kDescribe));
  if (config.forced_description) {
    Description d;
    d.triple = parse(*config.forced_description);
    d.text = *config.forced_description;
    d.corrupted = !oracle.description ||
                  !d.triple.same_statement(oracle.description->triple);
    s.description = d;
  } else if (oracle.description) {
    s.description = corrupt_description(*oracle.description, scene, config.epsilon,
                                        derive_seed(config.seed, streams::kCorrupt));
  }

  Json created;
  created["scene"] = encode(scene);
  created["config"] = encode(config);
  emit(s, EventKind::kCreated, Phase::kDescribed, std::move(created), ctx);
  Json described;
  described["description"] = optional_json(s.description);
  emit(s, EventKind::kDescribed, Phase::kDescribed, described, ctx);
  emit(s, EventKind::kReview, Phase::kAwaitingReview, std::move(described), ctx);
  return s;
}

void intervene(SessionState& s, std::string_view text, const EventContext& ctx) {
  if (s.phase != Phase::kAwaitingReview && s.phase != Phase::kFailed) {
    throw Error(ErrorCode::kPhase, "interventions are accepted in AWAITING_REVIEW or "
                                   "FAILED, session is " +
                                       std::string(to_string(s.phase)));
  }
  const RelationTriple triple = parse(text);
  Description d{triple, std::string(text), DescriptionSource::kHuman, std::nullopt, false};
  s.description = d;
  s.grounded.reset();
  s.ranking.clear();
  s.success.reset();
  s.failure.reset();
  ++s.interventions;
  Json p;
  p["text"] = std::string(text);
  p["description"] = encode(d);
  emit(s, EventKind::kIntervention, Phase::kDescribed, std::move(p), ctx);
}

void step(SessionState& s, const EventContext& ctx) {
  switch (s.phase) {
    case Phase::kDescribed:
    case Phase::kAwaitingReview:
      ground_stage(s, ctx);
      return;
    case Phase::kGrounded:
      plan_stage(s, ctx);
      return;
    case Phase::kPlanned:
      execute_stage(s, ctx);
      return;
    case Phase::kExecuted:
    case Phase::kFailed:
      break;
  }
  throw Error(ErrorCode::kPhase, "session is " + std::string(to_string(s.phase)) +
                                     "; nothing to step");
}

Json to_json(const SessionState& s) {
  Json j;
  j["id"] = s.id;
  j["phase"] = std::string(to_string(s.phase));
  j["scene"] = encode(s.scene);
  j["config"] = encode(s.config);
  j["description"] = optional_json(s.description);
  j["grounded"] = s.grounded ? encode(*s.grounded) : Json(nullptr);
  Json grasps = Json::array();
  for (const auto& g : s.ranking) grasps.push_back(encode(g));
  j["grasps"] = std::move(grasps);
  j["success"] = s.success ? Json(*s.success) : Json(nullptr);
  if (s.failure) {
    j["failure"] = {{"stage", s.failure->stage},
                    {"code", s.failure->code},
                    {"reason", s.failure->reason}};
  } else {
    j["failure"] = nullptr;
  }
  j["interventions"] = s.interventions;
  j["ground_attempts"] = s.ground_attempts;
  Json history = Json::array();
  for (const auto& e : s.history) history.push_back(encode(e));
  j["history"] = std::move(history);
  return j;
}

Json view_json(const SessionState& s) {
  Json j;
  j["session"] = s.id;
  j["phase"] = std::string(to_string(s.phase));
  j["image"] = {{"width", s.scene.width}, {"height", s.scene.height}};
  const SceneGraph graph = closure(s.scene);
  Json objects = Json::array();
  for (const auto& o : s.scene.objects) {
    Json oj;
    oj["id"] = o.id;
    oj["class"] = o.class_name;
    oj["bbox"] = encode(o.bbox);
    oj["surface"] = surface_label(graph, o.id);
    oj["grounded"] = s.grounded && s.grounded->object_id == o.id;
    objects.push_back(std::move(oj));
  }
  j["objects"] = std::move(objects);
  Json relations = Json::array();
  for (const auto& r : graph.relations()) {
    relations.push_back({{"subject", r.subject},
                         {"predicate", std::string(to_string(r.predicate))},
                         {"object", r.object}});
  }
  j["relations"] = std::move(relations);
  if (s.description) {
    j["description"] = {{"text", s.description->text},
                        {"source", std::string(to_string(s.description->source))}};
  } else {
    j["description"] = nullptr;
  }
  if (s.grounded) {
    j["grounded"] = {{"object_id", s.grounded->object_id},
                     {"region", encode(s.grounded->region)}};
  } else {
    j["grounded"] = nullptr;
  }
  Json overlay = Json::array();
  for (std::size_t i = 0; i < s.ranking.size(); ++i) {
    const auto& g = s.ranking[i];
    Json corners_json = Json::array();
    for (const auto& p : corners(g.rect)) corners_json.push_back(Json::array({p.x, p.y}));
    overlay.push_back({{"rank", i + 1},
                       {"rect", encode(g.rect)},
                       {"corners", std::move(corners_json)},
                       {"final_conf", g.final_conf}});
  }
  j["grasps"] = std::move(overlay);
  j["success"] = s.success ? Json(*s.success) : Json(nullptr);
  j["failure"] = s.failure ? Json(s.failure->reason) : Json(nullptr);
  return j;
}

SessionState replay(const std::vector<SessionEvent>& events) {
  if (events.empty()) throw Error(ErrorCode::kParse, "replay: empty event log");
  const SessionEvent& first = events.front();
  if (first.kind != EventKind::kCreated) {
    throw Error(ErrorCode::kParse, "replay: log does not start with a created event");
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].session_id != first.session_id) {
      throw Error(ErrorCode::kParse, "replay: log mixes sessions '" + first.session_id +
                                         "' and '" + events[i].session_id + "'");
    }
    if (events[i].sequence <= events[i - 1].sequence) {
      throw Error(ErrorCode::kParse, "replay: sequence numbers are not increasing at event " +
                                         std::to_string(i));
    }
  }
  const Scene scene =
      decode_scene(codec::field(first.payload, "scene", "created"), "created.scene");
  const SessionConfig config =
      decode_session_config(codec::field(first.payload, "config", "created"), "created.config");

  std::size_t pos = 0;
  EventContext ctx;
  ctx.clock = [&] { return pos < events.size() ? events[pos].timestamp : std::string(); };
  ctx.sink = [&](const SessionEvent& produced) {
    if (pos >= events.size()) {
      throw Error(ErrorCode::kReplayDivergence,
                  "replay produced event seq " + std::to_string(produced.sequence) +
                      " beyond the end of the log");
    }
    const std::string want = to_log_line(events[pos]);
    const std::string got = to_log_line(produced);
    if (want != got) {
      throw Error(ErrorCode::kReplayDivergence,
                  "replay diverges at event " + std::to_string(pos),
                  {"logged:   " + want, "replayed: " + got});
    }
    ++pos;
  };

  SessionState s = start_session(first.session_id, scene, config, ctx);
  while (pos < events.size()) {
    const SessionEvent& next = events[pos];
    const std::size_t before = pos;
    switch (next.kind) {
      case EventKind::kIntervention:
        intervene(s, codec::string(codec::field(next.payload, "text", "intervention"),
                                   "intervention.text"),
                  ctx);
        break;
      case EventKind::kGrounded:
      case EventKind::kPlanned:
      case EventKind::kExecuted:
      case EventKind::kFailed:
        step(s, ctx);
        break;
      default:
        throw Error(ErrorCode::kReplayDivergence,
                    "unexpected " + std::string(to_string(next.kind)) + " event at " +
                        std::to_string(pos));
    }
    if (pos == before) {
      throw Error(ErrorCode::kReplayDivergence, "replay made no progress at event " +
                                                    std::to_string(pos));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// SessionManager

struct SessionManager::Entry {
  std::mutex mutex;
  SessionState state;
  std::ofstream log;
};

SessionManager::SessionManager(std::optional<std::filesystem::path> log_dir,
                               std::function<std::string()> clock)
    : log_dir_(std::move(log_dir)), clock_(std::move(clock)) {
  if (log_dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*log_dir_, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create log directory " + log_dir_->string());
  }
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no session '" + id + "'");
  return it->second;
}

Json SessionManager::create(const Scene& scene, const SessionConfig& config) {
  std::string id;
  {
    std::unique_lock lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s-%06llu",
                  static_cast<unsigned long long>(next_id_++));
    id = buf;
  }
  auto entry = std::make_shared<Entry>();
  if (log_dir_) {
    entry->log.open(*log_dir_ / (id + ".jsonl"), std::ios::binary | std::ios::trunc);
    if (!entry->log) throw Error(ErrorCode::kIo, "cannot open event log for " + id);
  }
  EventContext ctx{clock_, [&](const SessionEvent& e) {
                     if (entry->log.is_open()) {
                       entry->log << to_log_line(e) << '\n';
                       entry->log.flush();
                     }
                   }};
  entry->state = start_session(id, scene, config, ctx);
  Json out = to_json(entry->state);
  std::unique_lock lock(mutex_);
  sessions_.emplace(id, std::move(entry));
  return out;
}

Json SessionManager::mutate(
    const std::string& id,
    const std::function<void(SessionState&, const EventContext&)>& fn) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  EventContext ctx{clock_, [&](const SessionEvent& e) {
                     if (entry->log.is_open()) {
                       entry->log << to_log_line(e) << '\n';
                       entry->log.flush();
                     }
                   }};
  // Work on a copy so a throwing stage leaves the session as it was.
  SessionState next = entry->state;
  fn(next, ctx);
  entry->state = std::move(next);
  return to_json(entry->state);
}

Json SessionManager::get(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return to_json(entry->state);
}

Json SessionManager::intervene(const std::string& id, std::string_view text) {
  return mutate(id, [&](SessionState& s, const EventContext& ctx) {
    graspwise::intervene(s, text, ctx);
  });
}

Json SessionManager::step(const std::string& id) {
  return mutate(id, [](SessionState& s, const EventContext& ctx) { graspwise::step(s, ctx); });
}

Json SessionManager::view(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return view_json(entry->state);
}

std::string SessionManager::log(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  std::string out;
  for (const auto& e : entry->state.history) {
    out += to_log_line(e);
    out += '\n';
  }
  return out;
}

std::vector<std::string> SessionManager::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

}  // namespace graspwise
