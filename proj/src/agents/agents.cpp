#include "hexwar/agents/agents.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

#include "hexwar/encoding.hpp"

namespace hexwar::agents {

namespace {

void require_live(const GameState& g) {
  if (g.is_terminal()) throw RulesError("agent", "asked to move in a terminal state");
}

}  // namespace

Action RandomAgent::choose(const GameState& g, std::mt19937_64& rng) const {
  require_live(g);
  const auto acts = legal_actions(g);
  std::uniform_int_distribution<std::size_t> pick(0, acts.size() - 1);
  return acts[pick(rng)];
}

PolicyAgent::PolicyAgent(std::shared_ptr<const nn::Network> net, int iterations)
    : net_(std::move(net)), iterations_(iterations) {
  if (!net_) throw std::invalid_argument("policy agent needs a network");
  if (iterations_ < 1) throw std::invalid_argument("policy agent needs at least one iteration");
}

Action PolicyAgent::choose(const GameState& g, std::mt19937_64&) const {
  require_live(g);
  const auto legal = indexed_legal_actions(g);
  if (legal.size() == 1) return legal[0].second;
  const auto out = net_->forward(encode_state(g), iterations_);
  std::size_t best = 0;
  for (std::size_t i = 1; i < legal.size(); ++i) {
    if (out.policy_logits[legal[i].first] > out.policy_logits[legal[best].first]) best = i;
  }
  return legal[best].second;
}

MctsAgent::MctsAgent(std::shared_ptr<const mcts::Evaluator> eval, mcts::SearchConfig cfg)
    : eval_(std::move(eval)), cfg_(cfg) {
  if (!eval_) throw std::invalid_argument("mcts agent needs an evaluator");
  cfg_.root_noise = false;
  cfg_.validate();
}

MctsAgent::MctsAgent(std::shared_ptr<const nn::Network> net, mcts::SearchConfig cfg)
    : MctsAgent(std::make_shared<mcts::NetworkEvaluator>(std::move(net), cfg.inference_iterations), cfg) {}

Action MctsAgent::choose(const GameState& g, std::mt19937_64& rng) const {
  require_live(g);
  const auto legal = indexed_legal_actions(g);
  if (legal.size() == 1) return legal[0].second;
  const auto res = mcts::run_search(g, *eval_, cfg_, rng);
  return res.legal[mcts::select_move(res.visits, 0.0, rng)].second;
}

int GoalRushAgent::goal_distance(const GameState& g, HexCoord from, Player p) const {
  const auto& spec = g.spec();
  std::vector<HexCoord> goals;
  for (std::size_t i = 0; i < spec.vp_tiles.size(); ++i) {
    if (g.vp_control[i] != p) goals.push_back(spec.vp_tiles[i].at);
  }
  if (goals.empty()) return -1;
  if (!opt_.costed_paths) {
    int best = std::numeric_limits<int>::max();
    for (auto c : goals) best = std::min(best, hex_distance(from, c));
    return best;
  }
  // Dijkstra on entry costs, ignoring units.
  const int cells = spec.num_cells();
  std::vector<int> dist(cells, std::numeric_limits<int>::max());
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[cell_index(from, spec.width)] = 0;
  pq.push({0, cell_index(from, spec.width)});
  while (!pq.empty()) {
    auto [d, cell] = pq.top();
    pq.pop();
    if (d != dist[cell]) continue;
    const HexCoord c = cell_coord(cell, spec.width);
    for (auto goal : goals) {
      if (goal == c) return d;
    }
    for (Direction dir : kAllDirections) {
      auto n = neighbor(c, dir, spec.height, spec.width);
      if (!n) continue;
      const int nc = cell_index(*n, spec.width);
      const int nd = d + spec.terrain_at(*n).movement_cost;
      if (nd < dist[nc]) {
        dist[nc] = nd;
        pq.push({nd, nc});
      }
    }
  }
  return -1;
}

int GoalRushAgent::entry_cost(const GameState& g, HexCoord c) const {
  return opt_.costed_paths ? g.spec().terrain_at(c).movement_cost : 1;
}

std::optional<HexCoord> GoalRushAgent::next_step(const GameState& g, HexCoord c, Player p) const {
  const int here = goal_distance(g, c, p);
  if (here <= 0) return std::nullopt;
  std::optional<HexCoord> best;
  int best_d = std::numeric_limits<int>::max();
  for (Direction d : kAllDirections) {
    auto n = neighbor(c, d, g.height(), g.width());
    if (!n) continue;
    const int nd = goal_distance(g, *n, p);
    if (nd < 0 || nd >= here) continue;
    const int total = entry_cost(g, *n) + nd;
    if (total < best_d) {
      best_d = total;
      best = n;
    }
  }
  return best;
}

Action GoalRushAgent::choose(const GameState& g, std::mt19937_64& rng) const {
  require_live(g);
  const Player me = g.current_player;
  const auto acts = legal_actions(g);
  auto is_legal = [&](const Action& a) { return std::find(acts.begin(), acts.end(), a) != acts.end(); };

  switch (g.sub_phase) {
    case SubPhase::Reinforcement: {
      std::uniform_int_distribution<std::size_t> pick(0, acts.size() - 1);
      return acts[pick(rng)];
    }
    case SubPhase::Movement: {
      // First ready unit in row-major, bottom-level-first order.
      for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
          const HexCoord at{r, c};
          for (int l = 0; l < g.stack_size(at); ++l) {
            const Unit& u = g.unit(at, l);
            if (u.owner != me || u.status != UnitStatus::ReadyToMove) continue;
            const int here = goal_distance(g, at, me);
            std::optional<Action> best;
            int best_d = std::numeric_limits<int>::max();
            if (here > 0) {
              for (Direction d : kAllDirections) {
                const Action mv = Action::move(at, l, d);
                if (!is_legal(mv)) continue;
                const HexCoord dest = step(at, d);
                const int nd = goal_distance(g, dest, me);
                if (nd < 0 || nd >= here) continue;
                const int total = entry_cost(g, dest) + nd;
                if (total < best_d) {
                  best_d = total;
                  best = mv;
                }
              }
            }
            return best ? *best : Action::no_move(at, l);
          }
        }
      }
      break;
    }
    case SubPhase::TargetSelection: {
      std::optional<Action> first_pass;
      for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
          const HexCoord at{r, c};
          for (int l = 0; l < g.stack_size(at); ++l) {
            const Unit& u = g.unit(at, l);
            if (u.owner != me || u.status == UnitStatus::Attacked) continue;
            if (auto next = next_step(g, at, me); next && g.occupant(*next) == other(me)) {
              const Action target = Action::select_target(*next);
              if (is_legal(target)) return target;
            }
            if (!first_pass) first_pass = Action::no_attack(at, l);
          }
        }
      }
      if (first_pass) return *first_pass;
      break;
    }
    case SubPhase::AttackerSelection: {
      for (const auto& a : acts) {
        if (a.kind == ActionKind::SelectAttacker) return a;
      }
      for (const auto& a : acts) {
        if (a.kind == ActionKind::ConfirmAttack) return a;
      }
      break;
    }
  }
  return acts.front();
}

}  // namespace hexwar::agents
