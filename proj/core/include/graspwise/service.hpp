#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "graspwise/dataset_io.hpp"
#include "graspwise/session.hpp"

namespace graspwise {

/// HTTP front end of a SessionManager.
///
///   POST /sessions                    {"scene_id"} or {"scene"}, optional "config"
///   GET  /sessions/{id}               full state
///   POST /sessions/{id}/intervention  {"text"}
///   POST /sessions/{id}/step
///   GET  /sessions/{id}/view          render data
///   GET  /logs/{id}                   event log, one JSON object per line
///
/// Errors answer {"error": {"code", "message", "details"}} where code is the
/// ErrorCode string.
class SessionService {
 public:
  struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
  };

  /// `corpus` resolves scene ids; it must outlive the service.
  explicit SessionService(SessionManager& manager, const Corpus* corpus = nullptr);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Routes one request. Used by the HTTP server; callable directly.
  Response handle(std::string_view method, std::string_view path, std::string_view body);

  /// Binds; port 0 picks a free port. Returns the bound port. Throws
  /// Error(kIo) on bind failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace graspwise
