#pragma once

// Built-in 5x5 scenarios, the default unit/terrain tables and the random map
// generator used by the randomized and extrapolation settings.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "hexwar/rules.hpp"

namespace hexwar::eval {

// Terrain table indices (fixed order in every built-in scenario).
enum TerrainId : std::uint8_t { kPlains = 0, kMountain = 1, kForest = 2, kSwamp = 3 };
enum UnitId : int { kInfantry = 0, kArmour = 1 };

std::vector<Terrain> default_terrain_table();
std::vector<UnitType> default_unit_table();

/// Probabilities over {swamp, mountain, plains, forest}.
struct TerrainDistribution {
  double swamp = 0.10;
  double mountain = 0.15;
  double plains = 0.65;
  double forest = 0.10;

  /// Throws std::invalid_argument unless all entries are >= 0 and sum to 1 (1e-9).
  void validate() const;
  static TerrainDistribution all_plains() { return {0.0, 0.0, 1.0, 0.0}; }
};

struct RandomMap {
  std::vector<std::uint8_t> terrain;  // row-major TerrainId
  std::array<HexCoord, 2> vp;         // [0] held by player one, [1] by player two
};

/// I.i.d. terrain per tile; one VP per player at distinct uniform positions.
RandomMap generate_random_map(int height, int width, const TerrainDistribution& dist, std::uint64_t seed);

/// Scenario generated from a seed (randomized maps, extrapolation boards).
using ScenarioGenerator = std::function<ScenarioPtr(std::uint64_t seed)>;

/// asymmetric, symmetric, curriculum, randomized (with its seed-0 map).
std::map<std::string, ScenarioSpec> builtin_scenarios();
ScenarioSpec asymmetric_scenario();
ScenarioSpec symmetric_scenario();
ScenarioSpec curriculum_scenario();
ScenarioSpec randomized_scenario(std::uint64_t seed);

/// Plains board, one player-one infantry at a random cell, one player-two VP
/// at another random cell, no player-two units. Turn budget grows with the
/// board so the VP is always reachable.
ScenarioSpec plains_single_unit_scenario(int height, int width, std::uint64_t seed);
int plains_single_unit_turns(int height, int width);

/// Where a scenario comes from for each game of a match.
struct ScenarioSource {
  ScenarioPtr fixed;
  ScenarioGenerator generator;
  std::string name;

  ScenarioPtr for_game(std::uint64_t seed) const { return fixed ? fixed : generator(seed); }
  static ScenarioSource of(ScenarioSpec s);
  static ScenarioSource randomized();
  static ScenarioSource plains_single_unit(int height, int width);
};

/// Resolves a built-in name ("asymmetric", "randomized", "plains5x5", ...) or
/// a scenario file path.
ScenarioSource resolve_scenario(const std::string& name_or_path);

}  // namespace hexwar::eval
