#pragma once

// In-memory game sessions driven by JSON requests. Human seats submit
// actions; agent seats move on a per-session worker thread and every applied
// action is appended to an event log that clients can follow.

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hexwar/agents/agents.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::server {

using nlohmann::json;

/// HTTP-style status plus a JSON body.
struct Reply {
  int status = 200;
  json body;
};

struct ServerOptions {
  std::optional<std::string> checkpoint_dir;       // default: $HEXWAR_CHECKPOINT_DIR
  std::optional<std::filesystem::path> history_dir;  // write-through action logs
  std::uint64_t seed = 0;                           // agents' per-session generators derive from it
};

class Session {
 public:
  Session(std::string id, ScenarioPtr scenario, std::array<std::shared_ptr<const agents::Agent>, 2> agents,
          std::array<std::string, 2> seat_labels, std::uint64_t seed, std::optional<std::filesystem::path> history);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  json view() const;
  /// Applies a human action. 400 illegal, 409 out of turn.
  Reply submit(const json& action);
  /// Events with seq > since; blocks up to `wait` for at least one.
  std::vector<json> events_since(std::uint64_t since, std::chrono::milliseconds wait) const;
  std::vector<Action> history() const;
  GameState state() const;
  /// Blocks until no agent is to move (or the game is over).
  void wait_idle() const;

 private:
  bool agent_to_move_locked() const;
  void apply_locked(const Action& a, const std::string& actor);
  json view_locked() const;
  void agent_loop();

  std::string id_;
  ScenarioPtr scenario_;
  std::array<std::shared_ptr<const agents::Agent>, 2> agents_;  // null = human
  std::array<std::string, 2> labels_;
  std::optional<std::filesystem::path> history_path_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  GameState state_;
  std::vector<Action> history_;
  std::vector<json> events_;
  std::array<std::mt19937_64, 2> rng_;
  std::optional<std::string> agent_error_;
  bool stop_ = false;
  std::thread worker_;
};

class SessionManager {
 public:
  explicit SessionManager(ServerOptions opt = {});

  /// Body: {"scenario": name-or-path, "seats": {"1": "human"|agent spec, "2": ...}}.
  Reply create(const json& request);
  Reply view(const std::string& id) const;
  Reply submit(const std::string& id, const json& action);
  Reply history(const std::string& id) const;
  Reply list() const;
  std::shared_ptr<Session> find(const std::string& id) const;
  static json scenarios();
  json checkpoints() const;

 private:
  ServerOptions opt_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

/// Symbolic + tensor-index description of an action in g.
json action_json(const GameState& g, const Action& a);
/// Accepts {"index": flat} or {"kind", "row", "col", "level", "direction"}.
/// Throws std::invalid_argument when the object names no action.
Action parse_action(const GameState& g, const json& j);
json state_view(const GameState& g);

}  // namespace hexwar::server
