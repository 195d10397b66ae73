#include "hexwar/training/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

#include "hexwar/encoding.hpp"

namespace hexwar::training {

BufferedGame make_buffered_game(GameRecord record, const std::vector<GameState>& states) {
  if (states.size() != record.moves.size() + 1) throw std::invalid_argument("buffer: states do not match record");
  BufferedGame out;
  out.positions.reserve(record.moves.size());
  for (std::size_t i = 0; i < record.moves.size(); ++i) {
    const auto& m = record.moves[i];
    Position p;
    p.state = states[i];
    p.z = static_cast<float>(record.z);
    const auto legal = indexed_legal_actions(states[i]);
    p.legal.reserve(legal.size());
    for (const auto& [f, a] : legal) p.legal.push_back(f);
    p.target.assign(p.legal.size(), 0.0f);
    if (m.visits.empty()) {
      auto it = std::lower_bound(p.legal.begin(), p.legal.end(), m.action);
      if (it == p.legal.end() || *it != m.action) throw std::invalid_argument("buffer: recorded action is not legal");
      p.target[it - p.legal.begin()] = 1.0f;
    } else {
      for (const auto& [f, prob] : m.visits) {
        auto it = std::lower_bound(p.legal.begin(), p.legal.end(), f);
        if (it == p.legal.end() || *it != f) throw std::invalid_argument("buffer: visit on an illegal action");
        p.target[it - p.legal.begin()] = prob;
      }
    }
    out.positions.push_back(std::move(p));
  }
  out.record = std::move(record);
  return out;
}

nn::TrainingSample to_sample(const Position& p) {
  return {encode_state(p.state), p.legal, p.target, p.z};
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::add(BufferedGame game) {
  auto g = std::make_shared<const BufferedGame>(std::move(game));
  std::lock_guard lock(mu_);
  prefix_.push_back(evicted_positions_ + positions_);
  positions_ += g->positions.size();
  games_.push_back(std::move(g));
  ++added_;
  while (games_.size() > capacity_) {
    const std::size_t n = games_.front()->positions.size();
    games_.pop_front();
    prefix_.pop_front();
    positions_ -= n;
    evicted_positions_ += n;
  }
}

std::size_t ReplayBuffer::games() const {
  std::lock_guard lock(mu_);
  return games_.size();
}

std::size_t ReplayBuffer::positions() const {
  std::lock_guard lock(mu_);
  return positions_;
}

std::uint64_t ReplayBuffer::total_added() const {
  std::lock_guard lock(mu_);
  return added_;
}

std::pair<std::size_t, std::size_t> ReplayBuffer::locate(std::size_t flat) const {
  const std::size_t key = evicted_positions_ + flat;
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), key);
  const std::size_t game = static_cast<std::size_t>(it - prefix_.begin()) - 1;
  return {game, key - prefix_[game]};
}

std::vector<std::pair<std::size_t, std::size_t>> ReplayBuffer::sample_indices(std::size_t batch,
                                                                              std::mt19937_64& rng) const {
  std::lock_guard lock(mu_);
  if (positions_ == 0) throw std::logic_error("replay buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, positions_ - 1);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(locate(pick(rng)));
  return out;
}

std::vector<nn::TrainingSample> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  std::vector<std::shared_ptr<const BufferedGame>> held;
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  {
    std::lock_guard lock(mu_);
    if (positions_ == 0) throw std::logic_error("replay buffer is empty");
    std::uniform_int_distribution<std::size_t> pick(0, positions_ - 1);
    for (std::size_t i = 0; i < batch; ++i) {
      auto [g, m] = locate(pick(rng));
      held.push_back(games_[g]);
      idx.emplace_back(held.size() - 1, m);
    }
  }
  std::vector<nn::TrainingSample> out;
  out.reserve(batch);
  for (auto& [h, m] : idx) out.push_back(to_sample(held[h]->positions[m]));
  return out;
}

std::vector<GameRecord> ReplayBuffer::records() const {
  std::lock_guard lock(mu_);
  std::vector<GameRecord> out;
  for (const auto& g : games_) out.push_back(g->record);
  return out;
}

}  // namespace hexwar::training
