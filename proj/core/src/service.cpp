#include "graspwise/service.hpp"

#include <map>
#include <vector>

#include <httplib.h>

#include "graspwise/error.hpp"

namespace graspwise {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kPhase: return 409;
    case ErrorCode::kUnparseable:
    case ErrorCode::kArity: return 422;
    case ErrorCode::kInvalidScene:
    case ErrorCode::kValidation:
    case ErrorCode::kParse:
    case ErrorCode::kConfig:
    case ErrorCode::kVocabulary:
    case ErrorCode::kDomain: return 400;
    default: return 500;
  }
}

SessionService::Response error_response(int status, std::string_view code,
                                        const std::string& message,
                                        const std::vector<std::string>& details = {}) {
  Json err;
  err["code"] = std::string(code);
  err["message"] = message;
  err["details"] = details;
  Json j;
  j["error"] = std::move(err);
  return {status, j.dump(), "application/json"};
}

std::vector<std::string_view> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('/', pos);
    const auto part = path.substr(pos, next == std::string_view::npos ? path.size() - pos
                                                                      : next - pos);
    if (!part.empty()) parts.push_back(part);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

Json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
  try {
    return Json::parse(body.begin(), body.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("request body: ") + e.what());
  }
}

}  // namespace

struct SessionService::Impl {
  SessionManager& manager;
  const Corpus* corpus;
  std::map<std::string, const Scene*, std::less<>> scenes;
  httplib::Server server;
  bool bound = false;

  Impl(SessionManager& m, const Corpus* c) : manager(m), corpus(c) {
    if (corpus) {
      for (const auto& r : corpus->records) scenes.emplace(r.scene.id, &r.scene);
    }
  }

  Response create(std::string_view body) {
    const Json req = parse_body(body);
    codec::object(req, "request");
    Scene scene;
    if (const Json* inline_scene = codec::optional_field(req, "scene")) {
      scene = decode_scene(*inline_scene, "request.scene");
    } else if (const Json* sid = codec::optional_field(req, "scene_id")) {
      const auto id = codec::string(*sid, "request.scene_id");
      auto it = scenes.find(id);
      if (it == scenes.end()) throw Error(ErrorCode::kNotFound, "no scene '" + id + "'");
      scene = *it->second;
    } else {
      throw Error(ErrorCode::kParse, "request: needs \"scene\" or \"scene_id\"");
    }
    SessionConfig config;
    if (const Json* c = codec::optional_field(req, "config")) {
      config = decode_session_config(*c, "request.config");
    }
    return {201, manager.create(scene, config).dump(), "application/json"};
  }

  Response route(std::string_view method, std::string_view path, std::string_view body) {
    const auto parts = split_path(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (parts.size() == 1 && parts[0] == "sessions" && post) return create(body);
    if (parts.size() == 2 && parts[0] == "sessions" && get) {
      return {200, manager.get(std::string(parts[1])).dump(), "application/json"};
    }
    if (parts.size() == 3 && parts[0] == "sessions") {
      const std::string id(parts[1]);
      if (parts[2] == "intervention" && post) {
        const Json req = parse_body(body);
        codec::object(req, "request");
        const auto text = codec::string(codec::field(req, "text", "request"), "request.text");
        return {200, manager.intervene(id, text).dump(), "application/json"};
      }
      if (parts[2] == "step" && post) {
        return {200, manager.step(id).dump(), "application/json"};
      }
      if (parts[2] == "view" && get) {
        return {200, manager.view(id).dump(), "application/json"};
      }
    }
    if (parts.size() == 2 && parts[0] == "logs" && get) {
      return {200, manager.log(std::string(parts[1])), "application/x-ndjson"};
    }
    return error_response(404, "not_found",
                          "no route for " + std::string(method) + " " + std::string(path));
  }
};

SessionService::SessionService(SessionManager& manager, const Corpus* corpus)
    : impl_(std::make_unique<Impl>(manager, corpus)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  impl_->server.Get(R"(/.*)", handler);
  impl_->server.Post(R"(/.*)", handler);
}

SessionService::~SessionService() { stop(); }

SessionService::Response SessionService::handle(std::string_view method,
                                                std::string_view path,
                                                std::string_view body) {
  try {
    return impl_->route(method, path, body);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what(), e.details());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

int SessionService::bind(const std::string& host, int port) {
  // httplib's default adds SO_REUSEPORT, which lets a second server share
  // the port silently.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int bound_port = -1;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound_port = port;
  }
  if (bound_port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound_port;
}

void SessionService::serve() {
  if (!impl_->bound) throw Error(ErrorCode::kIo, "serve() before bind()");
  impl_->server.listen_after_bind();
}

void SessionService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void SessionService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace graspwise
