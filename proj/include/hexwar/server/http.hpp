#pragma once

// HTTP front end for SessionManager (JSON API under /api/v1, optional static
// files at /).
//
//   POST /api/v1/sessions                 create {scenario, seats}
//   GET  /api/v1/sessions                 list ids
//   GET  /api/v1/sessions/{id}            current view
//   POST /api/v1/sessions/{id}/actions    submit {index} or {kind,row,col,level,direction}
//   GET  /api/v1/sessions/{id}/history    applied actions
//   GET  /api/v1/sessions/{id}/events     server-sent events from ?since=N
//   GET  /api/v1/sessions/{id}/poll       same events as a JSON array (?since=N&wait_ms=M)
//   GET  /api/v1/scenarios, /api/v1/checkpoints, /api/v1/health

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hexwar/server/session.hpp"

namespace hexwar::server {

class HttpServer {
 public:
  HttpServer(SessionManager& sessions, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  /// Binds; returns the port (an ephemeral one when port == 0) or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hexwar::server
