// hexwar command-line tool: train, eval, extrapolate, play, serve.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hexwar/agents/spec.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/eval/extrapolation.hpp"
#include "hexwar/eval/match.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/nn/checkpoint.hpp"
#include "hexwar/server/http.hpp"
#include "hexwar/training/trainer.hpp"

using namespace hexwar;
namespace fs = std::filesystem;

namespace {

std::string validate_agent_spec(const std::string& s) {
  try {
    agents::parse_agent_spec(s);
    return {};
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
}

std::string validate_scenario(const std::string& s) {
  try {
    eval::resolve_scenario(s);
    return {};
  } catch (const std::exception& e) {
    return e.what();
  }
}

// "5..12" or "5,7,9".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range " + text);
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stoi(item, &used));
    if (used != item.size()) throw std::invalid_argument("not an integer: " + item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string validate_int_list(const std::string& s) {
  try {
    parse_int_list(s);
    return {};
  } catch (const std::exception& e) {
    return std::string("expected a range like 5..12 or a list like 6,15,30: ") + e.what();
  }
}

char owner_char(Player p, bool upper) {
  if (p == Player::None) return '.';
  const char c = p == Player::P1 ? 'a' : 'b';
  return upper ? static_cast<char>(c - 'a' + 'A') : c;
}

std::string render_board(const GameState& g) {
  std::ostringstream os;
  const ScenarioSpec& s = g.spec();
  os << "turn " << g.turn << "/" << s.total_turns << "  player " << (g.current_player == Player::P1 ? 1 : 2) << "  "
     << to_string(g.sub_phase) << (g.pregame ? " (pre-game)" : "") << "\n";
  for (int r = 0; r < s.height; ++r) {
    if (r & 1) os << "   ";
    for (int c = 0; c < s.width; ++c) {
      const HexCoord at{r, c};
      const Terrain& t = s.terrain_at(at);
      std::string cell(1, t.symbol);
      const int vp = s.vp_index(at);
      cell += vp >= 0 ? (g.vp_control[vp] == Player::None ? '*' : owner_char(g.vp_control[vp], false)) : ' ';
      const auto stack = g.stack(at);
      for (std::size_t l = 0; l < stack.size(); ++l) cell += owner_char(stack[l].owner, stack[l].type != 0);
      os << std::left << std::setw(6) << cell;
    }
    os << "\n";
  }
  os << "legend: terrain symbol, VP marker (*, a, b), units (a/b infantry, A/B other types)\n";
  return os.str();
}

training::TrainConfig train_defaults() {
  training::TrainConfig c;
  c.network.latent = 64;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hex and counter wargame: self-play training, evaluation and play"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "self-play training");
  training::TrainConfig tc = train_defaults();
  std::string train_scenario = "symmetric", init_ckpt, arch = "recurrent", output = "run";
  app.set_config("--config", "", "INI/TOML file; a [train] section sets train options");
  train->add_option("--scenario", train_scenario, "builtin name, plainsHxW or scenario file")
      ->check(validate_scenario)
      ->capture_default_str();
  train->add_option("--init", init_ckpt, "initial checkpoint (curriculum)")->check(CLI::ExistingFile);
  train->add_option("--output", output, "output directory")->capture_default_str();
  train->add_option("--steps", tc.steps)->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--latent", tc.network.latent)->check(CLI::Range(8, 4096))->capture_default_str();
  train->add_option("--arch", arch)->check(CLI::IsMember({"recurrent", "residual"}))->capture_default_str();
  train->add_option("--blocks", tc.network.residual_blocks, "residual blocks")->check(CLI::PositiveNumber);
  train->add_option("--max-iters", tc.max_iterations, "T")->check(CLI::Range(2, 1000))->capture_default_str();
  train->add_option("--alpha", tc.alpha)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train->add_option("--updates", tc.updates_per_step)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--batch", tc.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--lr", tc.optimizer.learning_rate)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--clip", tc.optimizer.clip_norm, "gradient norm clip (<=0 disables)")->capture_default_str();
  train->add_option("--games-per-step", tc.games_per_step)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--buffer", tc.buffer_capacity, "replay capacity in games")->capture_default_str();
  train->add_option("--sims", tc.search.simulations)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--c-puct", tc.search.c_puct)->capture_default_str();
  train->add_option("--dirichlet-alpha", tc.search.dirichlet_alpha)->capture_default_str();
  train->add_option("--noise-fraction", tc.search.noise_fraction)->capture_default_str();
  train->add_option("--temperature-plies", tc.search.temperature_plies)->capture_default_str();
  train->add_option("--inference-iters", tc.search.inference_iterations, "m used by search")->capture_default_str();
  train->add_option("--checkpoint-every", tc.checkpoint_every)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--eval-every", tc.eval_every)->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--eval-games", tc.eval_games, "per seat")->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--eval-sims", tc.eval_simulations)->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--ply-cap", tc.ply_cap_per_turn, "actions per turn before a game is called a draw")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--threads", tc.threads)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--seed", tc.seed)->capture_default_str();
  train->add_flag("--resume", tc.resume, "continue from <output>/checkpoints/latest.ckpt");
  train->add_flag("--verbose,-v", tc.verbose);

  // eval
  auto* ev = app.add_subcommand("eval", "play a fixed-seat match");
  std::string p1, p2, eval_scenario = "symmetric", eval_csv, eval_records;
  eval::MatchOptions eo;
  eo.games = 250;
  ev->add_option("--p1", p1, "agent spec for player one")->required()->check(validate_agent_spec);
  ev->add_option("--p2", p2, "agent spec for player two")->required()->check(validate_agent_spec);
  ev->add_option("--scenario", eval_scenario)->check(validate_scenario)->capture_default_str();
  ev->add_option("--games", eo.games)->check(CLI::Range(1, 100000000))->capture_default_str();
  ev->add_option("--seed", eo.seed)->capture_default_str();
  ev->add_option("--threads", eo.threads)->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--ply-cap", eo.ply_cap_per_turn)->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--csv", eval_csv, "append the stats row to this CSV file");
  ev->add_option("--records", eval_records, "write per-game records (JSON lines)");

  // extrapolate
  auto* ex = app.add_subcommand("extrapolate", "win rate vs board size sweep");
  std::vector<std::string> sweep_ckpts;
  std::string sizes_text = "5..12", iters_text = "6,15,30", sweep_agent = "policy", sweep_csv_path = "sweep.csv",
              sweep_svg_path = "sweep.svg";
  eval::SweepConfig sc;
  ex->add_option("--checkpoints", sweep_ckpts, "checkpoints, optionally label=path")->required();
  ex->add_option("--sizes", sizes_text)->check(validate_int_list)->capture_default_str();
  ex->add_option("--iters", iters_text)->check(validate_int_list)->capture_default_str();
  ex->add_option("--runs", sc.runs)->check(CLI::PositiveNumber)->capture_default_str();
  ex->add_option("--games", sc.games, "per run")->check(CLI::Range(1, 100000000))->capture_default_str();
  ex->add_option("--agent", sweep_agent)->check(CLI::IsMember({"policy", "mcts"}))->capture_default_str();
  ex->add_option("--sims", sc.simulations)->check(CLI::PositiveNumber)->capture_default_str();
  ex->add_option("--seed", sc.seed)->capture_default_str();
  ex->add_option("--threads", sc.threads)->check(CLI::PositiveNumber)->capture_default_str();
  ex->add_option("--csv", sweep_csv_path)->capture_default_str();
  ex->add_option("--svg", sweep_svg_path)->capture_default_str();

  // play
  auto* play = app.add_subcommand("play", "play against an agent in the terminal");
  std::string play_scenario = "symmetric", opponent = "random";
  int seat = 1;
  std::uint64_t play_seed = 0;
  play->add_option("--scenario", play_scenario)->check(validate_scenario)->capture_default_str();
  play->add_option("--seat", seat, "your seat")->check(CLI::IsMember({1, 2}))->capture_default_str();
  play->add_option("--opponent", opponent)->check(validate_agent_spec)->capture_default_str();
  play->add_option("--seed", play_seed)->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "JSON session service for the web client");
  std::string host = "127.0.0.1", static_dir, history_dir, checkpoint_dir;
  int port = 8080;
  std::uint64_t serve_seed = 0;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--checkpoint", checkpoint_dir, "checkpoint directory (default $HEXWAR_CHECKPOINT_DIR)")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--static", static_dir, "directory served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--history-dir", history_dir, "write-through action logs");
  serve->add_option("--seed", serve_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      tc.network.arch = arch == "residual" ? nn::Architecture::Residual : nn::Architecture::Recurrent;
      tc.output_dir = output;
      const auto source = eval::resolve_scenario(train_scenario);
      std::optional<fs::path> init;
      if (!init_ckpt.empty()) init = init_ckpt;
      std::cerr << "training on " << train_scenario << ": " << tc.describe() << "\n";
      const auto out = training::run_training(source, tc, init, [](const training::StepLog& s) {
        std::cout << training::metrics_csv_row(s) << std::endl;
      });
      std::cerr << "completed " << out.completed_steps << " steps; last checkpoint " << out.last_checkpoint.string()
                << "\n";
      return 0;
    }
    if (*ev) {
      const auto source = eval::resolve_scenario(eval_scenario);
      const ScenarioPtr probe = source.for_game(0);
      const auto a1 = agents::make_agent(agents::parse_agent_spec(p1), probe.get());
      const auto a2 = agents::make_agent(agents::parse_agent_spec(p2), probe.get());
      eo.keep_records = !eval_records.empty();
      const auto res = eval::play_match(*a1, *a2, source, eo);
      const std::string label = p1 + " vs " + p2 + " @ " + eval_scenario;
      std::cout << eval::stats_csv_header() << "\n" << eval::stats_csv_row(label, res.stats) << "\n";
      const auto& s = res.stats;
      std::cout << std::fixed << std::setprecision(1) << "p1 wins " << 100 * s.p1_win_rate() << "% ["
                << 100 * s.p1_win_interval().low << ", " << 100 * s.p1_win_interval().high << "]  p2 wins "
                << 100 * s.p2_win_rate() << "%  draws " << 100 * s.draw_rate() << "%  over " << s.games << " games\n";
      if (!eval_csv.empty()) {
        const bool fresh = !fs::exists(eval_csv);
        std::ofstream out(eval_csv, std::ios::app);
        if (fresh) out << eval::stats_csv_header() << "\n";
        out << eval::stats_csv_row(label, s) << "\n";
      }
      if (!eval_records.empty()) {
        fs::remove(eval_records);
        append_records(eval_records, res.records);
      }
      if (!s.valid) {
        std::cerr << "match aborted: " << s.error << "\n";
        return 3;
      }
      return 0;
    }
    if (*ex) {
      sc.sizes = parse_int_list(sizes_text);
      sc.iterations = parse_int_list(iters_text);
      sc.agent = sweep_agent == "mcts" ? eval::SweepConfig::AgentKind::Mcts : eval::SweepConfig::AgentKind::Policy;
      std::vector<eval::SweepNetwork> nets;
      for (const auto& item : sweep_ckpts) {
        const auto eq = item.find('=');
        const std::string label = eq == std::string::npos ? fs::path(item).stem().string() : item.substr(0, eq);
        const std::string path = agents::resolve_checkpoint(eq == std::string::npos ? item : item.substr(eq + 1));
        nets.push_back({label, std::make_shared<const nn::Network>(nn::load_network(path))});
      }
      const auto cells = eval::extrapolation_sweep(nets, sc);
      const std::string csv = eval::sweep_csv(cells);
      std::ofstream(sweep_csv_path) << csv;
      std::ofstream(sweep_svg_path) << eval::sweep_svg(cells);
      std::cout << csv;
      for (const auto& n : nets)
        for (int m : sc.iterations)
          if (sc.sizes.size() > 1)
            std::cout << "slope " << n.label << " m=" << m << ": " << eval::size_slope(cells, n.label, m) << "\n";
      return 0;
    }
    if (*play) {
      const auto source = eval::resolve_scenario(play_scenario);
      const ScenarioPtr scenario = source.for_game(play_seed);
      const auto agent = agents::make_agent(agents::parse_agent_spec(opponent), scenario.get());
      const Player human = seat == 1 ? Player::P1 : Player::P2;
      std::mt19937_64 rng(play_seed);
      GameState g = initial_state(scenario);
      while (!g.is_terminal()) {
        if (g.current_player != human) {
          const Action a = agent->choose(g, rng);
          std::cout << "opponent: " << describe(a) << "\n";
          g = apply_action(g, a);
          continue;
        }
        std::cout << "\n" << render_board(g);
        const auto legal = legal_actions(g);
        for (std::size_t i = 0; i < legal.size(); ++i) std::cout << "  [" << i << "] " << describe(legal[i]) << "\n";
        std::cout << "choice> " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) return 1;
        std::size_t used = 0;
        long choice = -1;
        try {
          choice = std::stol(line, &used);
        } catch (const std::exception&) {
        }
        if (choice < 0 || static_cast<std::size_t>(choice) >= legal.size() || used != line.size()) {
          std::cout << "enter a number between 0 and " << legal.size() - 1 << "\n";
          continue;
        }
        g = apply_action(g, legal[choice]);
      }
      std::cout << "\n" << render_board(g) << "result: " << to_string(*terminal_result(g)) << "\n";
      return 0;
    }
    if (*serve) {
      server::ServerOptions so;
      if (!checkpoint_dir.empty()) so.checkpoint_dir = checkpoint_dir;
      if (!history_dir.empty()) so.history_dir = history_dir;
      so.seed = serve_seed;
      server::SessionManager sessions(so);
      std::optional<fs::path> stat;
      if (!static_dir.empty()) stat = static_dir;
      server::HttpServer http(sessions, stat);
      const int bound = http.bind(host, port);
      if (bound < 0) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      std::cerr << "serving on http://" << host << ":" << bound << "/api/v1\n";
      http.serve();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
