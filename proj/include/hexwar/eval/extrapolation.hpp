#pragma once

// Size-extrapolation sweep: networks trained on small plains boards play the
// single-unit plains scenario on larger boards against Random, for several
// inference iteration counts.

#include <memory>
#include <string>
#include <vector>

#include "hexwar/nn/network.hpp"

namespace hexwar::eval {

struct SweepNetwork {
  std::string label;
  std::shared_ptr<const nn::Network> network;
};

struct SweepConfig {
  std::vector<int> sizes{5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<int> iterations{6, 15, 30};
  int runs = 3;
  int games = 100;  // per run
  enum class AgentKind { Policy, Mcts } agent = AgentKind::Policy;
  int simulations = 50;  // Mcts only
  std::uint64_t seed = 0;
  int threads = 1;
  int ply_cap_per_turn = 40;

  void validate() const;
};

struct SweepCell {
  std::string label;
  int size = 0;
  int iterations = 0;
  std::vector<double> run_win_rates;
  double mean = 0.0;
};

/// Every (network, size, iteration count) cell, network-major then size then
/// iterations. The network plays player one; the opponent is Random. Throws
/// std::invalid_argument for a network whose S/R does not fit the scenario.
std::vector<SweepCell> extrapolation_sweep(const std::vector<SweepNetwork>& networks, const SweepConfig& cfg);

std::string sweep_csv(const std::vector<SweepCell>& cells);

/// Win rate against board size, one curve per (label, iterations).
std::string sweep_svg(const std::vector<SweepCell>& cells, const std::string& title = "win rate vs board size");

/// Least-squares slope of mean win rate over size for one curve.
double size_slope(const std::vector<SweepCell>& cells, const std::string& label, int iterations);

}  // namespace hexwar::eval
