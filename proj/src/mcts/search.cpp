#include "hexwar/mcts/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hexwar/encoding.hpp"

namespace hexwar::mcts {

void SearchConfig::validate() const {
  if (simulations < 1) throw std::invalid_argument("search: simulations must be >= 1");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) throw std::invalid_argument("search: epsilon must lie in [0, 1]");
  if (!(c_puct >= 0.0)) throw std::invalid_argument("search: c_puct must be nonnegative");
  if (root_noise && !(dirichlet_alpha > 0.0)) throw std::invalid_argument("search: dirichlet alpha must be positive");
  if (inference_iterations < 1) throw std::invalid_argument("search: inference iterations must be >= 1");
}

NetworkEvaluator::NetworkEvaluator(std::shared_ptr<const nn::Network> net, int iterations)
    : net_(std::move(net)), iterations_(iterations) {
  if (!net_) throw std::invalid_argument("NetworkEvaluator: null network");
}

Evaluation NetworkEvaluator::evaluate(const GameState& g, std::span<const std::pair<int, Action>> legal) const {
  const auto out = net_->forward(encode_state(g), iterations_);
  std::vector<int> idx;
  idx.reserve(legal.size());
  for (const auto& [f, a] : legal) idx.push_back(f);
  return {nn::masked_softmax(out.policy_logits, idx), out.value};
}

Evaluation UniformEvaluator::evaluate(const GameState&, std::span<const std::pair<int, Action>> legal) const {
  return {std::vector<double>(legal.size(), 1.0 / static_cast<double>(legal.size())), value_};
}

namespace {

struct Node {
  GameState state;
  bool expanded = false;
  bool terminal = false;
  double terminal_value = 0.0;
  std::vector<std::pair<int, Action>> legal;
  std::vector<double> prior;
  std::vector<int> n;
  std::vector<double> w;
  std::vector<std::unique_ptr<Node>> child;
  int visits = 0;  // 1 for the expansion + one per simulation through it

  explicit Node(GameState g) : state(std::move(g)) {
    terminal = state.is_terminal();
    if (terminal) terminal_value = result_value(*terminal_result(state));
  }
};

double expand(Node& node, const Evaluator& eval) {
  node.legal = indexed_legal_actions(node.state);
  if (node.legal.empty()) throw std::logic_error("search: non-terminal state without legal actions");
  Evaluation e = eval.evaluate(node.state, node.legal);
  if (e.priors.size() != node.legal.size()) throw std::logic_error("search: evaluator returned wrong prior count");
  node.prior = std::move(e.priors);
  node.n.assign(node.legal.size(), 0);
  node.w.assign(node.legal.size(), 0.0);
  node.child.resize(node.legal.size());
  node.expanded = true;
  node.visits = 1;
  return std::clamp(e.value, -1.0, 1.0);
}

std::size_t select_child(const Node& node, double c_puct) {
  const double sign = node.state.current_player == Player::P1 ? 1.0 : -1.0;
  const double sqrt_n = std::sqrt(static_cast<double>(node.visits));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < node.legal.size(); ++i) {
    const double q = node.n[i] ? node.w[i] / node.n[i] : 0.0;
    const double score = sign * q + c_puct * node.prior[i] * sqrt_n / (1.0 + node.n[i]);
    if (score > best_score) {  // strict: lowest index wins ties
      best_score = score;
      best = i;
    }
  }
  return best;
}

void add_dirichlet(std::vector<double>& prior, double alpha, double eps, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> noise(prior.size());
  double sum = 0.0;
  for (auto& x : noise) {
    x = gamma(rng);
    sum += x;
  }
  if (sum <= 0.0) return;
  for (std::size_t i = 0; i < prior.size(); ++i) prior[i] = (1.0 - eps) * prior[i] + eps * noise[i] / sum;
}

}  // namespace

SearchResult run_search(const GameState& root_state, const Evaluator& eval, const SearchConfig& cfg,
                        std::mt19937_64& rng) {
  cfg.validate();
  if (root_state.is_terminal()) throw RulesError("search.root", "cannot search from a terminal state");
  Node root(root_state);
  expand(root, eval);
  if (cfg.root_noise && cfg.noise_fraction > 0.0) add_dirichlet(root.prior, cfg.dirichlet_alpha, cfg.noise_fraction, rng);

  SearchResult res;
  std::vector<std::pair<Node*, std::size_t>> path;
  for (int sim = 0; sim < cfg.simulations; ++sim) {
    path.clear();
    Node* node = &root;
    double value = 0.0;
    while (true) {
      const std::size_t a = select_child(*node, cfg.c_puct);
      path.emplace_back(node, a);
      auto& slot = node->child[a];
      if (!slot) slot = std::make_unique<Node>(apply_action(node->state, node->legal[a].second));
      Node* next = slot.get();
      if (next->terminal) {
        value = next->terminal_value;
        break;
      }
      if (!next->expanded) {
        value = expand(*next, eval);
        break;
      }
      node = next;
    }
    for (auto& [n, a] : path) {
      n->n[a] += 1;
      n->w[a] += value;
      n->visits += 1;
    }
    res.backed_up_total += value;
  }

  res.legal = root.legal;
  res.visits = root.n;
  res.value_sums = root.w;
  res.priors = root.prior;
  res.simulations = cfg.simulations;
  double total_n = 0.0;
  double total_w = 0.0;
  for (std::size_t i = 0; i < root.n.size(); ++i) {
    total_n += root.n[i];
    total_w += root.w[i];
  }
  res.policy.resize(root.n.size());
  for (std::size_t i = 0; i < root.n.size(); ++i) res.policy[i] = root.n[i] / total_n;
  res.root_value = total_w / total_n;
  return res;
}

std::size_t select_move(std::span<const double> weights, double temperature, std::mt19937_64& rng) {
  if (weights.empty()) throw std::invalid_argument("select_move: empty visit distribution");
  if (temperature <= 0.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < weights.size(); ++i) {
      if (weights[i] > weights[best]) best = i;
    }
    return best;
  }
  std::vector<double> p(weights.size());
  double mx = 0.0;
  for (double w : weights) mx = std::max(mx, w);
  if (mx <= 0.0) throw std::invalid_argument("select_move: all visit counts are zero");
  for (std::size_t i = 0; i < weights.size(); ++i) p[i] = std::pow(weights[i] / mx, 1.0 / temperature);
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  return pick(rng);
}

std::size_t select_move(std::span<const int> visits, double temperature, std::mt19937_64& rng) {
  std::vector<double> w(visits.begin(), visits.end());
  return select_move(std::span<const double>(w), temperature, rng);
}

}  // namespace hexwar::mcts
