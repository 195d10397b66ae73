#pragma once

// Replayable record of one game: the scenario, the actions as flat tensor
// indices, the search visit distribution before each move (sparse, may be
// empty for non-search players) and the final outcome.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hexwar/rules.hpp"

namespace hexwar {

struct MoveRecord {
  int action = 0;  // flat index into the (9S+3) x H x W action tensor
  Player player = Player::P1;
  std::vector<std::pair<int, float>> visits;  // (flat index, probability)
};

struct GameRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<MoveRecord> moves;
  int z = 0;  // +1 / 0 / -1, player-one perspective
  bool ply_capped = false;

  std::size_t size() const { return moves.size(); }
};

int outcome_value(GameResult r);

/// Replays the record from the initial state; throws RulesError when an action
/// is illegal. Returns every visited state (size() + 1 entries).
std::vector<GameState> replay_states(const GameRecord& r, const ScenarioPtr& scenario);
GameState replay(const GameRecord& r, const ScenarioPtr& scenario);

std::string to_json_line(const GameRecord& r);
GameRecord from_json_line(const std::string& line);

void append_records(const std::filesystem::path& path, const std::vector<GameRecord>& records);
std::vector<GameRecord> read_records(const std::filesystem::path& path);

}  // namespace hexwar
