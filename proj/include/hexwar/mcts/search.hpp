#pragma once

// PUCT search over single actions (one tile step, one selection, ...).
//
// Values are always from player one's point of view: nodes where player two
// moves pick the child maximising -Q instead of Q.

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hexwar/nn/network.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::mcts {

struct SearchConfig {
  int simulations = 100;
  double c_puct = 1.25;
  double dirichlet_alpha = 0.3;
  double noise_fraction = 0.25;  // epsilon
  bool root_noise = false;       // self-play only
  int temperature_plies = 8;     // tau = 1 for the first plies of self-play, then argmax
  int inference_iterations = 6;  // m

  void validate() const;
};

struct Evaluation {
  std::vector<double> priors;  // aligned with the legal list handed in
  double value = 0.0;          // player-one perspective, in [-1, 1]
};

/// Leaf evaluator. Implementations must be safe to call concurrently.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Evaluation evaluate(const GameState& g, std::span<const std::pair<int, Action>> legal) const = 0;
};

/// Masked softmax priors and the tanh value of a network after m iterations.
class NetworkEvaluator : public Evaluator {
 public:
  NetworkEvaluator(std::shared_ptr<const nn::Network> net, int iterations);
  Evaluation evaluate(const GameState& g, std::span<const std::pair<int, Action>> legal) const override;
  const nn::Network& network() const { return *net_; }
  int iterations() const { return iterations_; }

 private:
  std::shared_ptr<const nn::Network> net_;
  int iterations_;
};

/// Constant priors and value; used for baselines and tests.
class UniformEvaluator : public Evaluator {
 public:
  explicit UniformEvaluator(double value = 0.0) : value_(value) {}
  Evaluation evaluate(const GameState& g, std::span<const std::pair<int, Action>> legal) const override;

 private:
  double value_;
};

struct SearchResult {
  std::vector<std::pair<int, Action>> legal;  // ascending flat index
  std::vector<int> visits;                    // N(a)
  std::vector<double> value_sums;             // W(a)
  std::vector<double> priors;                 // root priors after noise
  std::vector<double> policy;                 // N(a) / sum N
  double root_value = 0.0;                    // mean backed-up value at the root
  double backed_up_total = 0.0;               // sum of every leaf value backed up
  int simulations = 0;
};

/// Throws RulesError on a terminal root. `rng` is only used for root noise.
SearchResult run_search(const GameState& root, const Evaluator& eval, const SearchConfig& cfg, std::mt19937_64& rng);

/// temperature <= 0: argmax (lowest index on ties); otherwise sample
/// proportional to visits^(1/temperature).
std::size_t select_move(std::span<const int> visits, double temperature, std::mt19937_64& rng);
std::size_t select_move(std::span<const double> weights, double temperature, std::mt19937_64& rng);

}  // namespace hexwar::mcts
