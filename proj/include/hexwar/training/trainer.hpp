#pragma once

// Self-play generation and network training. Two channels connect them: a
// NetworkStorage holding immutable parameter snapshots and the ReplayBuffer
// receiving finished games. Single-threaded mode alternates the two phases
// strictly and is bit-reproducible; threaded mode runs self-play workers
// concurrently with the trainer.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "hexwar/eval/match.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/game_record.hpp"
#include "hexwar/mcts/search.hpp"
#include "hexwar/nn/network.hpp"
#include "hexwar/nn/optimizer.hpp"
#include "hexwar/training/replay_buffer.hpp"

namespace hexwar::training {

/// Single writer, many readers; readers always see a complete snapshot.
class NetworkStorage {
 public:
  explicit NetworkStorage(std::shared_ptr<const nn::Network> initial = nullptr);
  void publish(const nn::Network& net);
  std::shared_ptr<const nn::Network> latest() const;
  std::uint64_t version() const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const nn::Network> net_;
  std::uint64_t version_ = 0;
};

struct TrainConfig {
  nn::NetworkConfig network;  // S and R are taken from the scenario
  int max_iterations = 6;     // T
  double alpha = 0.01;
  int updates_per_step = 16;
  int batch_size = 256;
  nn::AdamConfig optimizer;
  int games_per_step = 8;
  std::size_t buffer_capacity = 6000;
  mcts::SearchConfig search;  // self-play search (root noise enabled automatically)
  int steps = 100;
  int checkpoint_every = 10;
  int eval_every = 10;  // 0 disables periodic evaluation
  int eval_games = 50;  // per seat
  int eval_simulations = 0;  // 0: same as search.simulations
  int ply_cap_per_turn = 40;
  int threads = 1;  // self-play workers; 1 selects strict alternation
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "run";
  bool resume = false;
  bool verbose = false;

  void validate() const;
  std::string describe() const;
};

struct SelfPlayResult {
  GameRecord record;
  std::vector<GameState> states;  // record.size() + 1 states
};

/// One game, MCTS on both sides with root noise and the temperature schedule.
SelfPlayResult self_play_game(const nn::Network& net, const ScenarioPtr& scenario, const TrainConfig& cfg,
                              std::uint64_t seed);
SelfPlayResult self_play_game(const mcts::Evaluator& eval, const ScenarioPtr& scenario, const TrainConfig& cfg,
                              std::uint64_t seed);

struct StepLog {
  int step = 0;
  nn::LossBreakdown loss;  // mean over the step's updates
  double grad_norm = 0.0;
  std::size_t buffer_games = 0;
  std::size_t buffer_positions = 0;
  double seconds = 0.0;
  bool evaluated = false;
  eval::SeatAveraged eval;
};

/// cfg.updates_per_step optimisation steps on uniformly sampled positions.
/// Throws nn::NonFiniteLoss; the parameters of the failing update are untouched.
StepLog training_step(const ReplayBuffer& buffer, nn::Network& net, nn::Adam& adam, const TrainConfig& cfg,
                      std::uint64_t step_seed);

/// MCTS agent (cfg.eval_simulations, no noise) vs Random from both seats.
eval::SeatAveraged evaluate_vs_random(const nn::Network& net, const eval::ScenarioSource& source,
                                      const TrainConfig& cfg, std::uint64_t seed);

struct TrainingOutcome {
  std::shared_ptr<const nn::Network> network;
  std::vector<StepLog> log;
  int completed_steps = 0;
  std::filesystem::path last_checkpoint;
};

/// File layout under cfg.output_dir:
///   metrics.csv            one row per training step
///   games.jsonl            every self-play game, in generation order
///   checkpoints/step_N.ckpt and latest.ckpt (parameters + optimizer + progress)
TrainingOutcome run_training(const eval::ScenarioSource& scenario, const TrainConfig& cfg,
                             const std::optional<std::filesystem::path>& init_checkpoint = std::nullopt,
                             std::function<void(const StepLog&)> on_step = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const StepLog& s);

}  // namespace hexwar::training
