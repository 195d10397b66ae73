#include "hexwar/agents/spec.hpp"

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "hexwar/nn/checkpoint.hpp"

namespace hexwar::agents {

namespace {

constexpr const char* kUsage =
    "expected random[:seed], policy:<ckpt>[:iters], mcts:<ckpt>[:sims[:iters]] or goalrush[:seed]";

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = s.find(':', start);
    parts.push_back(s.substr(start, colon - start));
    if (colon == std::string::npos) return parts;
    start = colon + 1;
  }
}

long long number(const std::string& text, const std::string& what, const std::string& spec, long long min) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || v < min)
    throw std::invalid_argument("invalid agent spec '" + spec + "': " + what + " must be an integer >= " +
                                std::to_string(min) + " (" + kUsage + ")");
  return v;
}

}  // namespace

std::string AgentSpec::to_string() const {
  switch (kind) {
    case Kind::Random: return "random:" + std::to_string(seed);
    case Kind::GoalRush: return "goalrush:" + std::to_string(seed);
    case Kind::Policy: return "policy:" + checkpoint + ":" + std::to_string(iterations);
    case Kind::Mcts: return "mcts:" + checkpoint + ":" + std::to_string(simulations) + ":" + std::to_string(iterations);
  }
  return "?";
}

AgentSpec parse_agent_spec(const std::string& text) {
  const auto p = split(text);
  AgentSpec s;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("invalid agent spec '" + text + "': " + why + " (" + kUsage + ")");
  };
  if (p[0] == "random" || p[0] == "goalrush") {
    s.kind = p[0] == "random" ? AgentSpec::Kind::Random : AgentSpec::Kind::GoalRush;
    if (p.size() > 2) fail("too many fields");
    if (p.size() == 2) s.seed = static_cast<std::uint64_t>(number(p[1], "seed", text, 0));
  } else if (p[0] == "policy" || p[0] == "mcts") {
    const bool mcts = p[0] == "mcts";
    s.kind = mcts ? AgentSpec::Kind::Mcts : AgentSpec::Kind::Policy;
    if (p.size() < 2 || p[1].empty()) fail("missing checkpoint path");
    if (p.size() > (mcts ? 4u : 3u)) fail("too many fields");
    s.checkpoint = p[1];
    if (mcts) {
      if (p.size() >= 3) s.simulations = static_cast<int>(number(p[2], "simulations", text, 1));
      if (p.size() >= 4) s.iterations = static_cast<int>(number(p[3], "iterations", text, 1));
    } else if (p.size() >= 3) {
      s.iterations = static_cast<int>(number(p[2], "iterations", text, 1));
    }
  } else {
    fail("unknown agent kind '" + p[0] + "'");
  }
  return s;
}

std::string resolve_checkpoint(const std::string& path, const std::optional<std::string>& checkpoint_dir) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute() || fs::exists(p)) return path;
  std::optional<std::string> dir = checkpoint_dir;
  if (!dir) {
    if (const char* env = std::getenv("HEXWAR_CHECKPOINT_DIR")) dir = env;
  }
  if (dir) {
    const fs::path candidate = fs::path(*dir) / p;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

std::shared_ptr<const Agent> make_agent(const AgentSpec& spec, const ScenarioSpec* scenario,
                                        const std::optional<std::string>& checkpoint_dir) {
  switch (spec.kind) {
    case AgentSpec::Kind::Random: return std::make_shared<RandomAgent>(spec.seed);
    case AgentSpec::Kind::GoalRush: return std::make_shared<GoalRushAgent>(spec.seed);
    case AgentSpec::Kind::Policy:
    case AgentSpec::Kind::Mcts: break;
  }
  auto net = std::make_shared<const nn::Network>(nn::load_network(resolve_checkpoint(spec.checkpoint, checkpoint_dir)));
  if (scenario) {
    const auto& c = net->config();
    if (c.stack_limit != scenario->stack_limit || c.reinforcement_window != scenario->reinforcement_window)
      throw std::invalid_argument("checkpoint " + spec.checkpoint + " was built for S=" + std::to_string(c.stack_limit) +
                                  " R=" + std::to_string(c.reinforcement_window) + " but scenario '" + scenario->name +
                                  "' has S=" + std::to_string(scenario->stack_limit) +
                                  " R=" + std::to_string(scenario->reinforcement_window));
  }
  if (spec.kind == AgentSpec::Kind::Policy) return std::make_shared<PolicyAgent>(net, spec.iterations);
  mcts::SearchConfig sc;
  sc.simulations = spec.simulations;
  sc.inference_iterations = spec.iterations;
  return std::make_shared<MctsAgent>(net, sc);
}

}  // namespace hexwar::agents
