#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <vector>

#include "hexwar/encoding.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/nn/network.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::fixtures {

/// Random-looking but deterministic training samples for an (S, R) net.
inline std::vector<nn::TrainingSample> random_samples(const nn::NetworkConfig& cfg, int height, int width, int count,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<nn::TrainingSample> out;
  const int A = cfg.action_planes() * height * width;
  for (int n = 0; n < count; ++n) {
    nn::TrainingSample s;
    s.state = Tensor({cfg.input_channels(), height, width});
    for (auto& v : s.state.values()) v = u(rng);
    std::vector<int> all(A);
    for (int i = 0; i < A; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    const int k = 2 + static_cast<int>(rng() % 6);
    s.legal.assign(all.begin(), all.begin() + k);
    std::sort(s.legal.begin(), s.legal.end());
    float sum = 0.0f;
    for (int j = 0; j < k; ++j) {
      s.target.push_back(0.1f + (u(rng) + 1.0f));
      sum += s.target.back();
    }
    for (auto& t : s.target) t /= sum;
    s.z = static_cast<float>(static_cast<int>(rng() % 3) - 1);
    out.push_back(std::move(s));
  }
  return out;
}

/// Plays uniformly random legal actions for `plies` steps (stops at terminal).
inline GameState random_playout(GameState g, int plies, std::mt19937_64& rng) {
  for (int i = 0; i < plies && !g.is_terminal(); ++i) {
    auto acts = legal_actions(g);
    g = apply_action(g, acts[rng() % acts.size()]);
  }
  return g;
}

/// Board filled with one terrain index, default terrain and unit tables, no
/// reinforcements.
inline ScenarioSpec open_board(int height, int width, int stack_limit = 2, int window = 2, int turns = 5,
                               std::uint8_t terrain = eval::kPlains) {
  ScenarioSpec s;
  s.name = "fixture";
  s.height = height;
  s.width = width;
  s.terrain_types = eval::default_terrain_table();
  s.terrain_map.assign(height * width, terrain);
  s.unit_types = eval::default_unit_table();
  s.total_turns = turns;
  s.stack_limit = stack_limit;
  s.reinforcement_window = window;
  return s;
}

inline void set_terrain(ScenarioSpec& s, HexCoord c, std::uint8_t terrain) {
  s.terrain_map[cell_index(c, s.width)] = terrain;
}

/// Puts a unit on top of the stack at c, bypassing the rules.
inline void put(GameState& g, HexCoord c, Player owner, int type = eval::kInfantry,
                UnitStatus status = UnitStatus::ReadyToMove) {
  const UnitType& t = g.spec().unit_types[type];
  Unit u;
  u.type = static_cast<std::uint16_t>(type);
  u.owner = owner;
  u.status = status;
  u.attack = t.attack;
  u.defence = t.defence;
  u.movement = t.movement;
  u.movement_left = t.movement;
  const int cell = cell_index(c, g.width());
  g.units[cell * g.stack_limit() + g.counts[cell]] = u;
  g.counts[cell]++;
}

inline GameState start(const ScenarioSpec& s) { return initial_state(std::make_shared<const ScenarioSpec>(s)); }

/// Mid-game state on turn 1 with an empty board and player one to move,
/// built without running the sub-phase auto-advance.
inline GameState blank(const ScenarioSpec& s, SubPhase phase = SubPhase::Movement) {
  GameState g;
  g.scenario = std::make_shared<const ScenarioSpec>(s);
  g.units.assign(static_cast<std::size_t>(s.num_cells()) * s.stack_limit, Unit{});
  g.counts.assign(s.num_cells(), 0);
  g.pregame = false;
  g.sub_phase = phase;
  for (const auto& v : s.vp_tiles) g.vp_control.push_back(v.initial_owner);
  return g;
}

inline bool contains(const std::vector<Action>& v, const Action& a) {
  return std::find(v.begin(), v.end(), a) != v.end();
}

}  // namespace hexwar::fixtures
