#include "hexwar/server/http.hpp"

#include <httplib.h>

#include <string>

namespace hexwar::server {

namespace {

void send(httplib::Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::uint64_t query_u64(const httplib::Request& req, const std::string& key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoull(req.get_param_value(key));
  } catch (const std::exception&) {
    return fallback;
  }
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& sessions;
  httplib::Server http;
  explicit Impl(SessionManager& s) : sessions(s) {}
};

HttpServer::HttpServer(SessionManager& sessions, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(sessions)) {
  auto& http = impl_->http;
  SessionManager& mgr = impl_->sessions;

  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
    send(res, {200, {{"status", "ok"}, {"api", "v1"}}});
  });
  http.Get("/api/v1/scenarios", [](const httplib::Request&, httplib::Response& res) {
    send(res, {200, SessionManager::scenarios()});
  });
  http.Get("/api/v1/checkpoints", [&mgr](const httplib::Request&, httplib::Response& res) {
    send(res, {200, mgr.checkpoints()});
  });
  http.Get("/api/v1/sessions", [&mgr](const httplib::Request&, httplib::Response& res) { send(res, mgr.list()); });
  http.Post("/api/v1/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    json body = json::object();
    if (!req.body.empty()) {
      body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) return send(res, {400, {{"error", "request body is not valid JSON"}}});
    }
    send(res, mgr.create(body));
  });
  http.Get("/api/v1/sessions/:id", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.view(req.path_params.at("id")));
  });
  http.Get("/api/v1/sessions/:id/history", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.history(req.path_params.at("id")));
  });
  http.Post("/api/v1/sessions/:id/actions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return send(res, {400, {{"error", "request body is not valid JSON"}}});
    send(res, mgr.submit(req.path_params.at("id"), body));
  });
  http.Get("/api/v1/sessions/:id/poll", [&mgr](const httplib::Request& req, httplib::Response& res) {
    auto s = mgr.find(req.path_params.at("id"));
    if (!s) return send(res, {404, {{"error", "unknown session '" + req.path_params.at("id") + "'"}}});
    const auto wait = std::chrono::milliseconds(std::min<std::uint64_t>(query_u64(req, "wait_ms", 0), 30000));
    json events = json::array();
    for (auto& e : s->events_since(query_u64(req, "since", 0), wait)) events.push_back(std::move(e));
    send(res, {200, {{"events", std::move(events)}}});
  });
  http.Get("/api/v1/sessions/:id/events", [&mgr](const httplib::Request& req, httplib::Response& res) {
    auto s = mgr.find(req.path_params.at("id"));
    if (!s) return send(res, {404, {{"error", "unknown session '" + req.path_params.at("id") + "'"}}});
    auto cursor = std::make_shared<std::uint64_t>(query_u64(req, "since", 0));
    if (req.has_header("Last-Event-ID")) *cursor = std::stoull(req.get_header_value("Last-Event-ID"));
    auto finished = std::make_shared<bool>(false);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [s, cursor, finished](std::size_t, httplib::DataSink& sink) {
      if (*finished) {
        sink.done();
        return true;
      }
      const auto events = s->events_since(*cursor, std::chrono::milliseconds(15000));
      if (events.empty()) {
        const std::string ping = ": keep-alive\n\n";
        return sink.write(ping.data(), ping.size());
      }
      for (const auto& e : events) {
        const std::uint64_t seq = e["seq"].get<std::uint64_t>();
        const std::string frame = "id: " + std::to_string(seq) + "\nevent: " + e["type"].get<std::string>() +
                                  "\ndata: " + e.dump() + "\n\n";
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = seq;
        if (e["type"] == "terminal") *finished = true;
      }
      return true;
    });
  });
  if (static_dir) http.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->http.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace hexwar::server
