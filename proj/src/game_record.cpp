#include "hexwar/game_record.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "hexwar/encoding.hpp"

namespace hexwar {

int outcome_value(GameResult r) { return r == GameResult::P1Win ? 1 : (r == GameResult::P2Win ? -1 : 0); }

std::vector<GameState> replay_states(const GameRecord& r, const ScenarioPtr& scenario) {
  std::vector<GameState> out;
  out.reserve(r.moves.size() + 1);
  out.push_back(initial_state(scenario));
  for (const auto& m : r.moves) {
    const GameState& g = out.back();
    const Action a = decode_action(unflatten(m.action, g.height(), g.width()), g.stack_limit(), g.height(), g.width());
    out.push_back(apply_action(g, a));
  }
  return out;
}

GameState replay(const GameRecord& r, const ScenarioPtr& scenario) { return replay_states(r, scenario).back(); }

std::string to_json_line(const GameRecord& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["z"] = r.z;
  if (r.ply_capped) j["ply_capped"] = true;
  auto& actions = j["actions"] = nlohmann::json::array();
  auto& visits = j["visits"] = nlohmann::json::array();
  bool any_visits = false;
  for (const auto& m : r.moves) {
    actions.push_back(m.action);
    nlohmann::json v = nlohmann::json::array();
    for (const auto& [idx, p] : m.visits) v.push_back({idx, p});
    any_visits = any_visits || !m.visits.empty();
    visits.push_back(std::move(v));
  }
  if (!any_visits) j.erase("visits");
  return j.dump();
}

GameRecord from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  GameRecord r;
  r.scenario = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.z = j.at("z").get<int>();
  r.ply_capped = j.value("ply_capped", false);
  const auto& actions = j.at("actions");
  const bool has_visits = j.contains("visits");
  if (has_visits && j["visits"].size() != actions.size())
    throw std::invalid_argument("game record: visits and actions differ in length");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    MoveRecord m;
    m.action = actions[i].get<int>();
    if (has_visits) {
      for (const auto& e : j["visits"][i]) m.visits.emplace_back(e.at(0).get<int>(), e.at(1).get<float>());
    }
    r.moves.push_back(std::move(m));
  }
  return r;
}

void append_records(const std::filesystem::path& path, const std::vector<GameRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<GameRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<GameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(from_json_line(line));
  }
  return out;
}

}  // namespace hexwar
