#include "hexwar/eval/match.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hexwar/encoding.hpp"
#include "hexwar/seed.hpp"

namespace hexwar::eval {

Interval wilson_interval(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The bounds are exactly 0 and 1 at the extremes; rounding can miss them.
  const double low = k == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
  const double high = k == n ? 1.0 : std::clamp(centre + half, p, 1.0);
  return {low, high};
}

void WinRateStats::add(int z) {
  ++games;
  if (z > 0) {
    ++p1_wins;
  } else if (z < 0) {
    ++p2_wins;
  } else {
    ++draws;
  }
}

std::uint64_t game_seed(std::uint64_t match_seed, int game) {
  return derive_seed(match_seed, {0x6A4Du, static_cast<std::uint64_t>(game)});
}

GameRecord play_game(const agents::Agent& p1, const agents::Agent& p2, const ScenarioPtr& scenario,
                     std::uint64_t seed, int ply_cap_per_turn) {
  GameRecord rec;
  rec.scenario = scenario->name;
  rec.seed = seed;
  std::mt19937_64 rng1(derive_seed(seed, {1, p1.seed()}));
  std::mt19937_64 rng2(derive_seed(seed, {2, p2.seed()}));
  GameState g = initial_state(scenario);
  const int cap = ply_cap_per_turn * scenario->total_turns;
  while (!g.is_terminal()) {
    if (static_cast<int>(rec.moves.size()) >= cap) {
      rec.ply_capped = true;
      rec.z = 0;
      return rec;
    }
    const bool first = g.current_player == Player::P1;
    const Action a = first ? p1.choose(g, rng1) : p2.choose(g, rng2);
    if (auto why = violation(g, a))
      throw RulesError("agent", (first ? p1.name() : p2.name()) + " returned an illegal action: " + *why);
    rec.moves.push_back({action_flat_index(g, a), g.current_player, {}});
    g = apply_action(g, a);
  }
  rec.z = outcome_value(*terminal_result(g));
  return rec;
}

MatchResult play_match(const agents::Agent& agent1, const agents::Agent& agent2, const ScenarioSource& source,
                       const MatchOptions& opt) {
  if (opt.games < 1) throw std::invalid_argument("play_match: games must be >= 1");
  std::vector<GameRecord> records(opt.games);
  std::vector<char> done(opt.games, 0);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string error;
  auto worker = [&] {
    while (!failed.load()) {
      const int i = next.fetch_add(1);
      if (i >= opt.games) return;
      const std::uint64_t s = game_seed(opt.seed, i);
      try {
        records[i] = play_game(agent1, agent2, source.for_game(s), s, opt.ply_cap_per_turn);
        done[i] = 1;
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!failed.exchange(true)) error = "game " + std::to_string(i) + ": " + e.what();
      }
    }
  };
  const int threads = std::max(1, std::min(opt.threads, opt.games));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  MatchResult res;
  for (int i = 0; i < opt.games; ++i) {
    if (!done[i]) continue;
    res.stats.add(records[i].z);
    res.stats.ply_capped += records[i].ply_capped;
    if (opt.keep_records) res.records.push_back(std::move(records[i]));
  }
  if (failed) {
    res.stats.valid = false;
    res.stats.error = error;
  }
  return res;
}

SeatAveraged play_both_seats(const agents::Agent& agent, const agents::Agent& opponent, const ScenarioSource& source,
                             const MatchOptions& opt) {
  SeatAveraged out;
  MatchOptions a = opt;
  out.as_p1 = play_match(agent, opponent, source, a).stats;
  a.seed = derive_seed(opt.seed, {0x5EA7u});
  out.as_p2 = play_match(opponent, agent, source, a).stats;
  return out;
}

std::string stats_csv_header() {
  return "label,games,p1_wins,p2_wins,draws,p1_win_rate,p1_win_lo,p1_win_hi,p2_win_rate,p2_win_lo,p2_win_hi,"
         "draw_rate,draw_lo,draw_hi,ply_capped,valid";
}

std::string stats_csv_row(const std::string& label, const WinRateStats& s) {
  std::ostringstream os;
  const auto a = s.p1_win_interval();
  const auto b = s.p2_win_interval();
  const auto d = s.draw_interval();
  os << label << ',' << s.games << ',' << s.p1_wins << ',' << s.p2_wins << ',' << s.draws << ',' << s.p1_win_rate()
     << ',' << a.low << ',' << a.high << ',' << s.p2_win_rate() << ',' << b.low << ',' << b.high << ','
     << s.draw_rate() << ',' << d.low << ',' << d.high << ',' << s.ply_capped << ',' << (s.valid ? 1 : 0);
  return os.str();
}

WinRateStats stats_from_records(const std::vector<GameRecord>& records) {
  WinRateStats s;
  for (const auto& r : records) {
    s.add(r.z);
    s.ply_capped += r.ply_capped;
  }
  return s;
}

}  // namespace hexwar::eval
