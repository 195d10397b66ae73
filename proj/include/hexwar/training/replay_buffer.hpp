#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "hexwar/game_record.hpp"
#include "hexwar/nn/network.hpp"
#include "hexwar/rules.hpp"

namespace hexwar::training {

/// One stored position: the state before the move and its search target.
struct Position {
  GameState state;
  std::vector<int> legal;
  std::vector<float> target;
  float z = 0.0f;
};

struct BufferedGame {
  GameRecord record;
  std::vector<Position> positions;
};

/// Positions of an already replayed record. Moves without visit information
/// (non-search players) get a one-hot target on the played action.
BufferedGame make_buffered_game(GameRecord record, const std::vector<GameState>& states);

/// Bounded FIFO of complete games. Many concurrent appenders, one sampler.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity_games = 6000);

  void add(BufferedGame game);
  std::size_t games() const;
  std::size_t positions() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_added() const;

  /// Uniform over every stored move of every stored game.
  std::vector<nn::TrainingSample> sample(std::size_t batch, std::mt19937_64& rng) const;
  /// Indices (game, move) drawn by the same procedure, for statistics.
  std::vector<std::pair<std::size_t, std::size_t>> sample_indices(std::size_t batch, std::mt19937_64& rng) const;

  std::vector<GameRecord> records() const;

 private:
  std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<std::shared_ptr<const BufferedGame>> games_;
  std::deque<std::size_t> prefix_;  // prefix_[i] = positions before game i (offset by evicted_)
  std::size_t evicted_positions_ = 0;
  std::size_t positions_ = 0;
  std::uint64_t added_ = 0;
};

nn::TrainingSample to_sample(const Position& p);

}  // namespace hexwar::training
