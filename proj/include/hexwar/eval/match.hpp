#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexwar/agents/agents.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/game_record.hpp"

namespace hexwar::eval {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for k successes out of n (z = 1.96 by default).
Interval wilson_interval(int successes, int trials, double z = 1.959963984540054);

/// Outcomes of a fixed-seat match: agent one is always player one.
struct WinRateStats {
  int games = 0;
  int p1_wins = 0;
  int p2_wins = 0;
  int draws = 0;
  int ply_capped = 0;
  bool valid = true;     // false when an agent fault aborted the match
  std::string error;

  double p1_win_rate() const { return games ? static_cast<double>(p1_wins) / games : 0.0; }
  double p2_win_rate() const { return games ? static_cast<double>(p2_wins) / games : 0.0; }
  double draw_rate() const { return games ? static_cast<double>(draws) / games : 0.0; }
  Interval p1_win_interval() const { return wilson_interval(p1_wins, games); }
  Interval p2_win_interval() const { return wilson_interval(p2_wins, games); }
  Interval draw_interval() const { return wilson_interval(draws, games); }
  void add(int z);
};

struct MatchOptions {
  int games = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool keep_records = false;
  /// Games longer than ply_cap_per_turn x total_turns actions end as draws.
  int ply_cap_per_turn = 40;
};

struct MatchResult {
  WinRateStats stats;
  std::vector<GameRecord> records;  // in game order when keep_records
};

/// Seed for game i of a match (scenario generation and both agents derive from it).
std::uint64_t game_seed(std::uint64_t match_seed, int game);

GameRecord play_game(const agents::Agent& p1, const agents::Agent& p2, const ScenarioPtr& scenario,
                     std::uint64_t seed, int ply_cap_per_turn = 40);

/// Throws std::invalid_argument when games < 1.
MatchResult play_match(const agents::Agent& agent1, const agents::Agent& agent2, const ScenarioSource& source,
                       const MatchOptions& opt);

/// Agent's win/draw/loss rates seen from its own seat, averaged over both seats.
struct SeatAveraged {
  WinRateStats as_p1;  // agent is player one
  WinRateStats as_p2;  // agent is player two
  double win_rate() const { return 0.5 * (as_p1.p1_win_rate() + as_p2.p2_win_rate()); }
  double draw_rate() const { return 0.5 * (as_p1.draw_rate() + as_p2.draw_rate()); }
  double loss_rate() const { return 0.5 * (as_p1.p2_win_rate() + as_p2.p1_win_rate()); }
};

SeatAveraged play_both_seats(const agents::Agent& agent, const agents::Agent& opponent, const ScenarioSource& source,
                             const MatchOptions& opt);

/// CSV header and row used by the CLI and training logs.
std::string stats_csv_header();
std::string stats_csv_row(const std::string& label, const WinRateStats& s);

/// Recomputes stats from persisted records.
WinRateStats stats_from_records(const std::vector<GameRecord>& records);

}  // namespace hexwar::eval
