#pragma once

// The four evaluation agents behind one interface. Agents hold no mutable
// state: all randomness comes from the generator the caller passes in, so a
// single agent can serve concurrent matches.

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "hexwar/mcts/search.hpp"
#include "hexwar/nn/network.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::agents {

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  /// A legal action for the non-terminal state g.
  virtual Action choose(const GameState& g, std::mt19937_64& rng) const = 0;
  /// Mixed into the per-game generator so `random:1` and `random:2` differ.
  std::uint64_t seed() const { return seed_; }

 protected:
  explicit Agent(std::uint64_t seed = 0) : seed_(seed) {}

 private:
  std::uint64_t seed_;
};

using AgentPtr = std::shared_ptr<const Agent>;

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed = 0) : Agent(seed) {}
  std::string name() const override { return "random"; }
  Action choose(const GameState& g, std::mt19937_64& rng) const override;
};

/// Argmax of the masked policy after m iterations; lowest flat index on ties.
class PolicyAgent : public Agent {
 public:
  PolicyAgent(std::shared_ptr<const nn::Network> net, int iterations);
  std::string name() const override { return "policy"; }
  Action choose(const GameState& g, std::mt19937_64& rng) const override;

 private:
  std::shared_ptr<const nn::Network> net_;
  int iterations_;
};

/// Search without root noise, then the most visited action.
class MctsAgent : public Agent {
 public:
  MctsAgent(std::shared_ptr<const mcts::Evaluator> eval, mcts::SearchConfig cfg);
  MctsAgent(std::shared_ptr<const nn::Network> net, mcts::SearchConfig cfg);
  std::string name() const override { return "mcts"; }
  Action choose(const GameState& g, std::mt19937_64& rng) const override;
  const mcts::SearchConfig& config() const { return cfg_; }

 private:
  std::shared_ptr<const mcts::Evaluator> eval_;
  mcts::SearchConfig cfg_;
};

/// Scripted baseline: random placement, march every unit towards the nearest
/// VP it does not control, attack blockers with every adjacent unit.
class GoalRushAgent : public Agent {
 public:
  struct Options {
    bool costed_paths = false;  // terrain-weighted distance instead of hex_distance
  };
  explicit GoalRushAgent(std::uint64_t seed = 0) : Agent(seed) {}
  GoalRushAgent(std::uint64_t seed, Options opt) : Agent(seed), opt_(opt) {}
  std::string name() const override { return "goalrush"; }
  Action choose(const GameState& g, std::mt19937_64& rng) const override;

  /// Distance from c to the nearest VP not controlled by p (-1 if none).
  int goal_distance(const GameState& g, HexCoord c, Player p) const;
  /// Next tile on the unit's path towards its goal, if it has one.
  std::optional<HexCoord> next_step(const GameState& g, HexCoord c, Player p) const;

 private:
  int entry_cost(const GameState& g, HexCoord c) const;
  Options opt_;
};

}  // namespace hexwar::agents
