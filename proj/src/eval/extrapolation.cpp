#include "hexwar/eval/extrapolation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hexwar/agents/agents.hpp"
#include "hexwar/eval/match.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/seed.hpp"

namespace hexwar::eval {

void SweepConfig::validate() const {
  if (sizes.empty() || iterations.empty()) throw std::invalid_argument("sweep: sizes and iterations must be non-empty");
  for (int s : sizes)
    if (s < 2) throw std::invalid_argument("sweep: board sizes must be >= 2");
  for (int m : iterations)
    if (m < 1) throw std::invalid_argument("sweep: iteration counts must be >= 1");
  if (runs < 1 || games < 1) throw std::invalid_argument("sweep: runs and games must be >= 1");
  if (agent == AgentKind::Mcts && simulations < 1) throw std::invalid_argument("sweep: simulations must be >= 1");
}

std::vector<SweepCell> extrapolation_sweep(const std::vector<SweepNetwork>& networks, const SweepConfig& cfg) {
  cfg.validate();
  const ScenarioSpec probe = plains_single_unit_scenario(cfg.sizes.front(), cfg.sizes.front(), 0);
  for (const auto& n : networks) {
    if (!n.network) throw std::invalid_argument("sweep: network '" + n.label + "' is null");
    const auto& c = n.network->config();
    if (c.stack_limit != probe.stack_limit || c.reinforcement_window != probe.reinforcement_window)
      throw std::invalid_argument("sweep: network '" + n.label + "' has S=" + std::to_string(c.stack_limit) +
                                  " R=" + std::to_string(c.reinforcement_window) + ", the plains scenario needs S=" +
                                  std::to_string(probe.stack_limit) + " R=" +
                                  std::to_string(probe.reinforcement_window));
  }
  agents::RandomAgent random(0);
  std::vector<SweepCell> out;
  for (const auto& n : networks) {
    for (int size : cfg.sizes) {
      const ScenarioSource source = ScenarioSource::plains_single_unit(size, size);
      for (int m : cfg.iterations) {
        std::unique_ptr<agents::Agent> agent;
        if (cfg.agent == SweepConfig::AgentKind::Policy) {
          agent = std::make_unique<agents::PolicyAgent>(n.network, m);
        } else {
          mcts::SearchConfig sc;
          sc.simulations = cfg.simulations;
          sc.inference_iterations = m;
          agent = std::make_unique<agents::MctsAgent>(n.network, sc);
        }
        SweepCell cell;
        cell.label = n.label;
        cell.size = size;
        cell.iterations = m;
        for (int r = 0; r < cfg.runs; ++r) {
          MatchOptions opt;
          opt.games = cfg.games;
          opt.threads = cfg.threads;
          opt.ply_cap_per_turn = cfg.ply_cap_per_turn;
          // Same maps for every network and iteration count at a given size.
          opt.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(r)});
          const WinRateStats s = play_match(*agent, random, source, opt).stats;
          if (!s.valid) throw std::runtime_error("sweep: match aborted: " + s.error);
          cell.run_win_rates.push_back(s.p1_win_rate());
        }
        double sum = 0.0;
        for (double w : cell.run_win_rates) sum += w;
        cell.mean = sum / cell.run_win_rates.size();
        out.push_back(std::move(cell));
      }
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::size_t runs = 0;
  for (const auto& c : cells) runs = std::max(runs, c.run_win_rates.size());
  std::ostringstream os;
  os << "network,size,iterations,mean_win_rate";
  for (std::size_t r = 0; r < runs; ++r) os << ",run" << r;
  os << '\n';
  for (const auto& c : cells) {
    os << c.label << ',' << c.size << ',' << c.iterations << ',' << c.mean;
    for (std::size_t r = 0; r < runs; ++r) {
      os << ',';
      if (r < c.run_win_rates.size()) os << c.run_win_rates[r];
    }
    os << '\n';
  }
  return os.str();
}

double size_slope(const std::vector<SweepCell>& cells, const std::string& label, int iterations) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& c : cells) {
    if (c.label != label || c.iterations != iterations) continue;
    sx += c.size;
    sy += c.mean;
    sxx += static_cast<double>(c.size) * c.size;
    sxy += c.size * c.mean;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) throw std::invalid_argument("size_slope: need at least two sizes for " + label);
  return (n * sxy - sx * sy) / den;
}

std::string sweep_svg(const std::vector<SweepCell>& cells, const std::string& title) {
  constexpr double W = 640, H = 400, L = 60, R = 180, T = 40, B = 50;
  int lo = 1 << 30, hi = -(1 << 30);
  std::map<std::pair<std::string, int>, std::vector<std::pair<int, double>>> curves;
  for (const auto& c : cells) {
    lo = std::min(lo, c.size);
    hi = std::max(hi, c.size);
    curves[{c.label, c.iterations}].emplace_back(c.size, c.mean);
  }
  if (hi <= lo) hi = lo + 1;
  auto x = [&](double s) { return L + (s - lo) / (hi - lo) * (W - L - R); };
  auto y = [&](double w) { return T + (1.0 - w) * (H - T - B); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double w = i / 4.0;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>", L, y(w),
                  W - R, y(w));
    os << buf << "\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>", L - 6, y(w) + 4, w);
    os << buf << "\n";
  }
  for (int s = lo; s <= hi; ++s) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%dx%d</text>", x(s), H - B + 18,
                  s, s);
    os << buf << "\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">board size</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
     << ")\" text-anchor=\"middle\">win rate vs random</text>\n";
  int k = 0;
  for (auto& [key, pts] : curves) {
    std::sort(pts.begin(), pts.end());
    const char* colour = palette[k % 8];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& [s, w] : pts) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x(s), y(w));
      os << buf;
    }
    os << "\"/>\n";
    for (const auto& [s, w] : pts) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>", x(s), y(w), colour);
      os << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s m=%d</text>", W - R + 12,
                  T + 16.0 * k + 4, colour, key.first.c_str(), key.second);
    os << buf << "\n";
    ++k;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hexwar::eval
