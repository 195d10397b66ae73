#pragma once

// Agent spec strings used by the CLI and the session server:
//   random[:seed]  policy:<ckpt>[:iters]  mcts:<ckpt>[:sims[:iters]]  goalrush[:seed]

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "hexwar/agents/agents.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::agents {

struct AgentSpec {
  enum class Kind { Random, Policy, Mcts, GoalRush } kind = Kind::Random;
  std::uint64_t seed = 0;
  std::string checkpoint;
  int simulations = 100;
  int iterations = 6;

  std::string to_string() const;
};

/// Throws std::invalid_argument with a usage hint on malformed specs.
AgentSpec parse_agent_spec(const std::string& text);

/// Relative checkpoint paths that do not exist are looked up in
/// $HEXWAR_CHECKPOINT_DIR (or `checkpoint_dir` when given).
std::string resolve_checkpoint(const std::string& path, const std::optional<std::string>& checkpoint_dir = std::nullopt);

/// Builds the agent. Network agents are checked against the scenario's S and
/// R when one is given.
std::shared_ptr<const Agent> make_agent(const AgentSpec& spec, const ScenarioSpec* scenario = nullptr,
                                        const std::optional<std::string>& checkpoint_dir = std::nullopt);

}  // namespace hexwar::agents
