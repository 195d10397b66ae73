#include "hexwar/server/session.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "hexwar/agents/spec.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/scenario_io.hpp"
#include "hexwar/seed.hpp"

namespace hexwar::server {

namespace {

constexpr const char* kDirections[] = {"E", "NE", "NW", "W", "SW", "SE"};
constexpr ActionKind kKinds[] = {ActionKind::Move,           ActionKind::NoMove,        ActionKind::PlaceReinforcement,
                                 ActionKind::SelectTarget,   ActionKind::SelectAttacker, ActionKind::ConfirmAttack,
                                 ActionKind::NoAttack};

int player_number(Player p) { return p == Player::P1 ? 1 : (p == Player::P2 ? 2 : 0); }

bool has_level(ActionKind k) {
  return k == ActionKind::Move || k == ActionKind::NoMove || k == ActionKind::SelectAttacker || k == ActionKind::NoAttack;
}

json cell_json(HexCoord c) { return {{"row", c.row}, {"col", c.col}}; }

Reply error(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

}  // namespace

json action_json(const GameState& g, const Action& a) {
  json j;
  j["index"] = action_flat_index(g, a);
  j["kind"] = to_string(a.kind);
  j["row"] = a.at.row;
  j["col"] = a.at.col;
  if (has_level(a.kind)) j["level"] = a.level;
  if (a.kind == ActionKind::Move) j["direction"] = kDirections[index_of(a.direction)];
  j["description"] = describe(a);
  return j;
}

Action parse_action(const GameState& g, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("action must be a JSON object");
  if (j.contains("index")) {
    if (!j["index"].is_number_integer()) throw std::invalid_argument("index must be an integer");
    const long long idx = j["index"].get<long long>();
    const long long size = static_cast<long long>(action_planes(g.stack_limit())) * g.height() * g.width();
    if (idx < 0 || idx >= size)
      throw std::invalid_argument("index " + std::to_string(idx) + " is outside [0, " + std::to_string(size) + ")");
    return decode_action(unflatten(static_cast<int>(idx), g.height(), g.width()), g.stack_limit(), g.height(),
                         g.width());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw std::invalid_argument("action needs 'index' or 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  Action a;
  bool found = false;
  for (ActionKind k : kKinds) {
    if (kind == to_string(k)) {
      a.kind = k;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("unknown action kind '" + kind + "'");
  if (!j.contains("row") || !j.contains("col") || !j["row"].is_number_integer() || !j["col"].is_number_integer())
    throw std::invalid_argument("action needs integer 'row' and 'col'");
  a.at = {j["row"].get<int>(), j["col"].get<int>()};
  if (has_level(a.kind)) {
    if (j.contains("level") && !j["level"].is_number_integer()) throw std::invalid_argument("level must be an integer");
    a.level = j.value("level", 0);
  }
  if (a.kind == ActionKind::Move) {
    if (!j.contains("direction") || !j["direction"].is_string()) throw std::invalid_argument("move needs 'direction'");
    const std::string d = j["direction"].get<std::string>();
    bool ok = false;
    for (int i = 0; i < 6; ++i) {
      if (d == kDirections[i]) {
        a.direction = static_cast<Direction>(i);
        ok = true;
      }
    }
    if (!ok) throw std::invalid_argument("unknown direction '" + d + "' (E, NE, NW, W, SW, SE)");
  }
  return a;
}

json state_view(const GameState& g) {
  const ScenarioSpec& s = g.spec();
  json v;
  v["scenario"] = s.name;
  v["height"] = s.height;
  v["width"] = s.width;
  v["stack_limit"] = s.stack_limit;
  v["reinforcement_window"] = s.reinforcement_window;
  v["turn"] = g.turn;
  v["total_turns"] = s.total_turns;
  v["current_player"] = player_number(g.current_player);
  v["sub_phase"] = to_string(g.sub_phase);
  v["pregame"] = g.pregame;
  v["terminal"] = g.is_terminal();
  if (auto r = terminal_result(g)) v["result"] = to_string(*r);
  else v["result"] = nullptr;

  auto& terrain = v["terrain_types"] = json::array();
  for (const auto& t : s.terrain_types)
    terrain.push_back({{"name", t.name},
                       {"symbol", std::string(1, t.symbol)},
                       {"attack_modifier", t.attack_modifier},
                       {"defence_modifier", t.defence_modifier},
                       {"movement_cost", t.movement_cost},
                       {"yields_vp", t.yields_vp}});
  auto& types = v["unit_types"] = json::array();
  for (const auto& u : s.unit_types)
    types.push_back({{"name", u.name}, {"attack", u.attack}, {"defence", u.defence}, {"movement", u.movement}});

  auto& tiles = v["tiles"] = json::array();
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      const HexCoord at{r, c};
      json t = cell_json(at);
      t["terrain"] = s.terrain_map[cell_index(at, s.width)];
      const int vp = s.vp_index(at);
      t["vp"] = vp >= 0;
      if (vp >= 0) t["vp_owner"] = player_number(g.vp_control[vp]);
      auto& units = t["units"] = json::array();
      const auto stack = g.stack(at);
      for (std::size_t l = 0; l < stack.size(); ++l) {
        const Unit& u = stack[l];
        units.push_back({{"level", l},
                         {"owner", player_number(u.owner)},
                         {"type", u.type},
                         {"type_name", s.unit_types[u.type].name},
                         {"attack", u.attack},
                         {"defence", u.defence},
                         {"movement", u.movement},
                         {"movement_left", u.movement_left},
                         {"status", to_string(u.status)}});
      }
      tiles.push_back(std::move(t));
    }
  }
  auto& vps = v["vp_control"] = json::array();
  for (std::size_t i = 0; i < s.vp_tiles.size(); ++i) {
    json e = cell_json(s.vp_tiles[i].at);
    e["owner"] = player_number(g.vp_control[i]);
    vps.push_back(std::move(e));
  }
  v["pending_target"] = g.pending_target ? cell_json(*g.pending_target) : json(nullptr);
  auto& pa = v["pending_attackers"] = json::array();
  for (const auto& u : g.pending_attackers) pa.push_back({{"row", u.at.row}, {"col", u.at.col}, {"level", u.level}});
  auto& pr = v["pending_reinforcements"] = json::object();
  for (Player p : {Player::P1, Player::P2}) {
    auto& list = pr[std::to_string(player_number(p))] = json::array();
    for (const auto& ref : g.pending_reinforcements[seat_index(p)]) {
      const ReinforcementEntry& e = g.entry(p, ref);
      json locs = json::array();
      for (const auto& c : e.arrival_locations) locs.push_back(cell_json(c));
      list.push_back({{"type", e.unit_type},
                      {"type_name", s.unit_types[e.unit_type].name},
                      {"arrival_turn", e.arrival_turn},
                      {"locations", std::move(locs)}});
    }
  }
  auto& legal = v["legal_actions"] = json::array();
  if (!g.is_terminal()) {
    for (const auto& a : legal_actions(g)) legal.push_back(action_json(g, a));
  }
  return v;
}

Session::Session(std::string id, ScenarioPtr scenario, std::array<std::shared_ptr<const agents::Agent>, 2> agents,
                 std::array<std::string, 2> seat_labels, std::uint64_t seed,
                 std::optional<std::filesystem::path> history)
    : id_(std::move(id)),
      scenario_(std::move(scenario)),
      agents_(std::move(agents)),
      labels_(std::move(seat_labels)),
      history_path_(std::move(history)),
      state_(initial_state(scenario_)) {
  for (int i = 0; i < 2; ++i)
    rng_[i].seed(derive_seed(seed, {static_cast<std::uint64_t>(i + 1), agents_[i] ? agents_[i]->seed() : 0}));
  if (history_path_) {
    std::filesystem::create_directories(history_path_->parent_path());
    std::ofstream out(*history_path_, std::ios::trunc);
    out << json({{"session", id_}, {"seats", labels_}, {"scenario", serialize_scenario(*scenario_)}}).dump() << '\n';
  }
  events_.push_back({{"seq", 1}, {"type", "created"}, {"view", view_locked()}});
  worker_ = std::thread([this] { agent_loop(); });
}

Session::~Session() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

bool Session::agent_to_move_locked() const {
  return !state_.is_terminal() && !agent_error_ && agents_[seat_index(state_.current_player)] != nullptr;
}

json Session::view_locked() const {
  json v = state_view(state_);
  v["id"] = id_;
  v["seats"] = {{"1", labels_[0]}, {"2", labels_[1]}};
  v["history_length"] = history_.size();
  v["seq"] = events_.empty() ? 1 : events_.back()["seq"].get<std::uint64_t>();
  if (state_.is_terminal()) v["awaiting"] = "none";
  else v["awaiting"] = agents_[seat_index(state_.current_player)] ? "agent" : "human";
  if (agent_error_) v["agent_error"] = *agent_error_;
  return v;
}

json Session::view() const {
  std::lock_guard lock(mu_);
  return view_locked();
}

void Session::apply_locked(const Action& a, const std::string& actor) {
  const GameState before = state_;
  state_ = apply_action(before, a);
  history_.push_back(a);
  if (history_path_) {
    std::ofstream out(*history_path_, std::ios::app);
    out << json({{"index", action_flat_index(before, a)}, {"actor", actor}}).dump() << '\n';
  }
  const std::uint64_t seq = events_.back()["seq"].get<std::uint64_t>() + 1;
  events_.push_back({{"seq", seq},
                     {"type", "action"},
                     {"actor", actor},
                     {"player", player_number(before.current_player)},
                     {"action", action_json(before, a)}});
  events_.back()["view"] = view_locked();
  if (state_.is_terminal()) {
    const auto result = terminal_result(state_);
    events_.push_back({{"seq", seq + 1}, {"type", "terminal"}, {"result", to_string(*result)}});
    events_.back()["view"] = view_locked();
  }
  cv_.notify_all();
}

Reply Session::submit(const json& action) {
  std::lock_guard lock(mu_);
  if (state_.is_terminal()) return error(409, "the game is over", {{"view", view_locked()}});
  const int seat = seat_index(state_.current_player);
  if (agents_[seat])
    return error(409, "it is player " + std::to_string(seat + 1) + "'s turn (" + labels_[seat] + ")");
  Action a;
  try {
    a = parse_action(state_, action);
  } catch (const std::invalid_argument& e) {
    return error(400, std::string("malformed action: ") + e.what());
  }
  if (auto why = violation(state_, a))
    return error(400, "illegal action", {{"reason", *why}, {"action", describe(a)}});
  apply_locked(a, "human");
  return {200, {{"view", view_locked()}}};
}

void Session::agent_loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stop_ || agent_to_move_locked(); });
    if (stop_) return;
    const GameState snapshot = state_;
    const int seat = seat_index(snapshot.current_player);
    auto agent = agents_[seat];
    std::mt19937_64 rng = rng_[seat];
    lock.unlock();
    std::optional<Action> chosen;
    std::string failure;
    try {
      chosen = agent->choose(snapshot, rng);
      if (auto why = violation(snapshot, *chosen)) failure = "agent returned an illegal action: " + *why;
    } catch (const std::exception& e) {
      failure = std::string("agent failed: ") + e.what();
    }
    lock.lock();
    if (stop_) return;
    rng_[seat] = rng;
    if (!failure.empty()) {
      agent_error_ = failure;
      const std::uint64_t seq = events_.back()["seq"].get<std::uint64_t>() + 1;
      events_.push_back({{"seq", seq}, {"type", "error"}, {"error", failure}});
      cv_.notify_all();
      continue;
    }
    apply_locked(*chosen, labels_[seat]);
  }
}

std::vector<json> Session::events_since(std::uint64_t since, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  auto newest = [&] { return events_.back()["seq"].get<std::uint64_t>(); };
  cv_.wait_for(lock, wait, [&] { return newest() > since || stop_; });
  std::vector<json> out;
  for (const auto& e : events_)
    if (e["seq"].get<std::uint64_t>() > since) out.push_back(e);
  return out;
}

std::vector<Action> Session::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

GameState Session::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

void Session::wait_idle() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !agent_to_move_locked(); });
}

SessionManager::SessionManager(ServerOptions opt) : opt_(std::move(opt)) {
  if (!opt_.checkpoint_dir) {
    if (const char* env = std::getenv("HEXWAR_CHECKPOINT_DIR")) opt_.checkpoint_dir = env;
  }
}

Reply SessionManager::create(const json& request) {
  if (!request.is_object()) return error(400, "request body must be a JSON object");
  const std::string scenario_name = request.value("scenario", std::string("symmetric"));
  json seats = request.value("seats", json({{"1", "human"}, {"2", "random"}}));
  std::uint64_t n;
  {
    std::lock_guard lock(mu_);
    n = ++counter_;
  }
  ScenarioPtr scenario;
  try {
    scenario = eval::resolve_scenario(scenario_name).for_game(derive_seed(opt_.seed, {0x5C3Eu, n}));
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
  std::array<std::shared_ptr<const agents::Agent>, 2> agents;
  std::array<std::string, 2> labels;
  for (int i = 0; i < 2; ++i) {
    const std::string key = std::to_string(i + 1);
    if (!seats.is_object() || !seats.contains(key) || !seats[key].is_string())
      return error(400, "seats must map \"1\" and \"2\" to \"human\" or an agent spec");
    labels[i] = seats[key].get<std::string>();
    if (labels[i] == "human") continue;
    try {
      agents[i] = agents::make_agent(agents::parse_agent_spec(labels[i]), scenario.get(), opt_.checkpoint_dir);
    } catch (const std::exception& e) {
      return error(400, "seat " + key + ": " + e.what());
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%012llx",
                static_cast<unsigned long long>(derive_seed(opt_.seed, {0x1D5u, n}) & 0xFFFFFFFFFFFFull));
  const std::string id = std::string(buf) + "-" + std::to_string(n);
  std::optional<std::filesystem::path> hist;
  if (opt_.history_dir) hist = *opt_.history_dir / (id + ".jsonl");
  auto session = std::make_shared<Session>(id, scenario, agents, labels, derive_seed(opt_.seed, {0xA6Eu, n}), hist);
  {
    std::lock_guard lock(mu_);
    sessions_[id] = session;
  }
  return {201, {{"id", id}, {"view", session->view()}}};
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Reply SessionManager::view(const std::string& id) const {
  auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  return {200, s->view()};
}

Reply SessionManager::submit(const std::string& id, const json& action) {
  auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  return s->submit(action);
}

Reply SessionManager::history(const std::string& id) const {
  auto s = find(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  const GameState start = initial_state(s->state().scenario);
  GameState g = start;
  json actions = json::array();
  for (const auto& a : s->history()) {
    actions.push_back(action_json(g, a));
    g = apply_action(g, a);
  }
  return {200, {{"id", id}, {"actions", std::move(actions)}}};
}

Reply SessionManager::list() const {
  std::lock_guard lock(mu_);
  json ids = json::array();
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return {200, {{"sessions", std::move(ids)}}};
}

json SessionManager::scenarios() {
  json names = json::array();
  for (const auto& [name, spec] : eval::builtin_scenarios())
    names.push_back({{"name", name}, {"height", spec.height}, {"width", spec.width}, {"total_turns", spec.total_turns}});
  return {{"scenarios", std::move(names)}, {"generated", {"randomized", "plainsHxW"}}};
}

json SessionManager::checkpoints() const {
  json out = json::array();
  if (opt_.checkpoint_dir && std::filesystem::is_directory(*opt_.checkpoint_dir)) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(*opt_.checkpoint_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".ckpt")
        out.push_back(std::filesystem::relative(e.path(), *opt_.checkpoint_dir).string());
    }
  }
  std::sort(out.begin(), out.end());
  return {{"checkpoint_dir", opt_.checkpoint_dir ? json(*opt_.checkpoint_dir) : json(nullptr)},
          {"checkpoints", std::move(out)}};
}

}  // namespace hexwar::server
