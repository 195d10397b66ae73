#include "hexwar/training/trainer.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hexwar/agents/agents.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/eval/match.hpp"
#include "hexwar/nn/checkpoint.hpp"
#include "hexwar/seed.hpp"

namespace hexwar::training {

namespace {

enum Stream : std::uint64_t { kInit = 1, kSelfPlay = 2, kTrain = 3, kEval = 4, kSelfPlayAsync = 5 };

namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

NetworkStorage::NetworkStorage(std::shared_ptr<const nn::Network> initial) : net_(std::move(initial)) {}

void NetworkStorage::publish(const nn::Network& net) {
  auto copy = std::make_shared<const nn::Network>(net);  // built fully before it becomes visible
  std::lock_guard lock(mu_);
  net_ = std::move(copy);
  ++version_;
}

std::shared_ptr<const nn::Network> NetworkStorage::latest() const {
  std::lock_guard lock(mu_);
  return net_;
}

std::uint64_t NetworkStorage::version() const {
  std::lock_guard lock(mu_);
  return version_;
}

void TrainConfig::validate() const {
  if (max_iterations < 2) throw std::invalid_argument("train: T must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("train: alpha must lie in [0, 1]");
  if (updates_per_step < 1 || batch_size < 1) throw std::invalid_argument("train: updates and batch must be >= 1");
  if (games_per_step < 1) throw std::invalid_argument("train: games_per_step must be >= 1");
  if (steps < 0) throw std::invalid_argument("train: steps must be >= 0");
  if (threads < 1) throw std::invalid_argument("train: threads must be >= 1");
  if (eval_every < 0 || eval_games < 0) throw std::invalid_argument("train: eval cadence must be >= 0");
  if (checkpoint_every < 1) throw std::invalid_argument("train: checkpoint_every must be >= 1");
  search.validate();
}

std::string TrainConfig::describe() const {
  std::ostringstream os;
  os << "latent=" << network.latent << " arch=" << (network.arch == nn::Architecture::Recurrent ? "recurrent" : "residual")
     << " residual_blocks=" << network.residual_blocks << " T=" << max_iterations << " alpha=" << alpha
     << " updates_per_step=" << updates_per_step << " batch_size=" << batch_size << " lr=" << optimizer.learning_rate
     << " clip=" << optimizer.clip_norm << " games_per_step=" << games_per_step << " buffer=" << buffer_capacity
     << " simulations=" << search.simulations << " c_puct=" << search.c_puct
     << " dirichlet_alpha=" << search.dirichlet_alpha << " epsilon=" << search.noise_fraction
     << " temperature_plies=" << search.temperature_plies << " inference_iterations=" << search.inference_iterations
     << " steps=" << steps << " eval_every=" << eval_every << " eval_games=" << eval_games
     << " eval_simulations=" << eval_simulations << " threads=" << threads << " seed=" << seed;
  return os.str();
}

SelfPlayResult self_play_game(const nn::Network& net, const ScenarioPtr& scenario, const TrainConfig& cfg,
                              std::uint64_t seed) {
  // Non-owning alias: the evaluator only lives for this call.
  mcts::NetworkEvaluator eval(std::shared_ptr<const nn::Network>(&net, [](const nn::Network*) {}),
                              cfg.search.inference_iterations);
  return self_play_game(eval, scenario, cfg, seed);
}

SelfPlayResult self_play_game(const mcts::Evaluator& eval, const ScenarioPtr& scenario, const TrainConfig& cfg,
                              std::uint64_t seed) {
  mcts::SearchConfig sc = cfg.search;
  sc.root_noise = true;
  std::mt19937_64 rng(seed);
  SelfPlayResult out;
  out.record.scenario = scenario->name;
  out.record.seed = seed;
  out.states.push_back(initial_state(scenario));
  const int cap = cfg.ply_cap_per_turn * scenario->total_turns;
  while (!out.states.back().is_terminal()) {
    const GameState& g = out.states.back();
    if (static_cast<int>(out.record.moves.size()) >= cap) {
      out.record.ply_capped = true;
      if (cfg.verbose)
        std::cerr << "warning: self-play game " << seed << " hit the ply cap (" << cap << "); recorded as a draw\n";
      break;
    }
    MoveRecord m;
    m.player = g.current_player;
    const auto legal = indexed_legal_actions(g);
    Action chosen = legal[0].second;
    if (legal.size() == 1) {
      m.action = legal[0].first;
      m.visits = {{legal[0].first, 1.0f}};
    } else {
      const auto res = mcts::run_search(g, eval, sc, rng);
      const double tau = static_cast<int>(out.record.moves.size()) < sc.temperature_plies ? 1.0 : 0.0;
      const std::size_t pick = mcts::select_move(res.visits, tau, rng);
      chosen = res.legal[pick].second;
      m.action = res.legal[pick].first;
      for (std::size_t i = 0; i < res.legal.size(); ++i) {
        if (res.visits[i] > 0) m.visits.emplace_back(res.legal[i].first, static_cast<float>(res.policy[i]));
      }
    }
    out.record.moves.push_back(std::move(m));
    out.states.push_back(apply_action(g, chosen));
  }
  const GameState& last = out.states.back();
  out.record.z = last.is_terminal() ? outcome_value(*terminal_result(last)) : 0;
  return out;
}

StepLog training_step(const ReplayBuffer& buffer, nn::Network& net, nn::Adam& adam, const TrainConfig& cfg,
                      std::uint64_t step_seed) {
  if (buffer.positions() == 0) throw std::logic_error("training_step: replay buffer is empty");
  std::mt19937_64 rng(step_seed);
  StepLog log;
  nn::StepConfig sc{cfg.max_iterations, cfg.alpha};
  for (int u = 0; u < cfg.updates_per_step; ++u) {
    const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
    const auto m = nn::optimize_step(net, adam, batch, sc, rng);
    log.loss.total += m.loss.total;
    log.loss.policy += m.loss.policy;
    log.loss.value += m.loss.value;
    log.loss.max_iters += m.loss.max_iters;
    log.loss.progressive += m.loss.progressive;
    log.loss.n = m.loss.n;
    log.loss.k = m.loss.k;
    log.grad_norm += m.grad_norm;
  }
  const double inv = 1.0 / cfg.updates_per_step;
  log.loss.total *= inv;
  log.loss.policy *= inv;
  log.loss.value *= inv;
  log.loss.max_iters *= inv;
  log.loss.progressive *= inv;
  log.grad_norm *= inv;
  log.buffer_games = buffer.games();
  log.buffer_positions = buffer.positions();
  return log;
}

eval::SeatAveraged evaluate_vs_random(const nn::Network& net, const eval::ScenarioSource& source,
                                      const TrainConfig& cfg, std::uint64_t seed) {
  mcts::SearchConfig sc = cfg.search;
  sc.root_noise = false;
  if (cfg.eval_simulations > 0) sc.simulations = cfg.eval_simulations;
  agents::MctsAgent agent(std::make_shared<const nn::Network>(net), sc);
  agents::RandomAgent random(0);
  eval::MatchOptions opt;
  opt.games = std::max(1, cfg.eval_games);
  opt.seed = seed;
  opt.threads = cfg.threads;
  opt.ply_cap_per_turn = cfg.ply_cap_per_turn;
  return eval::play_both_seats(agent, random, source, opt);
}

std::string metrics_csv_header() {
  return "step,loss,policy_loss,value_loss,loss_max_iters,loss_progressive,n,k,grad_norm,buffer_games,"
         "buffer_positions,seconds,p1_win,p1_draw,p1_loss,p2_win,p2_draw,p2_loss,win_rate";
}

std::string metrics_csv_row(const StepLog& s) {
  std::ostringstream os;
  os.precision(6);
  os << s.step << ',' << s.loss.total << ',' << s.loss.policy << ',' << s.loss.value << ',' << s.loss.max_iters << ','
     << s.loss.progressive << ',' << s.loss.n << ',' << s.loss.k << ',' << s.grad_norm << ',' << s.buffer_games << ','
     << s.buffer_positions << ',' << s.seconds;
  if (s.evaluated) {
    const auto& e = s.eval;
    os << ',' << e.as_p1.p1_win_rate() << ',' << e.as_p1.draw_rate() << ',' << e.as_p1.p2_win_rate() << ','
       << e.as_p2.p2_win_rate() << ',' << e.as_p2.draw_rate() << ',' << e.as_p2.p1_win_rate() << ',' << e.win_rate();
  } else {
    os << ",,,,,,,";
  }
  return os.str();
}

namespace {

nn::Archive checkpoint_archive(const nn::Network& net, const nn::Adam& adam, int step, std::uint64_t games) {
  nn::Archive a = nn::to_archive(net);
  nn::add_optimizer(a, adam);
  a.tensors["trainer.step"] = {{1}, {static_cast<float>(step)}};
  a.tensors["trainer.games"] = {{2}, {static_cast<float>(games & 0xFFFFFu), static_cast<float>(games >> 20)}};
  return a;
}

struct Progress {
  int step = 0;
  std::uint64_t games = 0;
};

Progress progress_of(const nn::Archive& a) {
  Progress p;
  if (auto it = a.tensors.find("trainer.step"); it != a.tensors.end()) p.step = static_cast<int>(it->second.data.at(0));
  if (auto it = a.tensors.find("trainer.games"); it != a.tensors.end())
    p.games = static_cast<std::uint64_t>(it->second.data.at(0)) | (static_cast<std::uint64_t>(it->second.data.at(1)) << 20);
  return p;
}

void add_record(ReplayBuffer& buffer, const eval::ScenarioSource& source, GameRecord rec) {
  const auto states = replay_states(rec, source.for_game(rec.seed));
  buffer.add(make_buffered_game(std::move(rec), states));
}

}  // namespace

TrainingOutcome run_training(const eval::ScenarioSource& source, const TrainConfig& cfg_in,
                             const std::optional<fs::path>& init_checkpoint,
                             std::function<void(const StepLog&)> on_step) {
  TrainConfig cfg = cfg_in;
  const ScenarioPtr probe = source.for_game(0);
  cfg.network.stack_limit = probe->stack_limit;
  cfg.network.reinforcement_window = probe->reinforcement_window;
  cfg.validate();

  const fs::path dir = cfg.output_dir;
  const fs::path ckpt_dir = dir / "checkpoints";
  const fs::path latest = ckpt_dir / "latest.ckpt";
  const fs::path games_path = dir / "games.jsonl";
  const fs::path metrics_path = dir / "metrics.csv";
  fs::create_directories(ckpt_dir);

  nn::Network net = nn::Network::random(cfg.network, derive_seed(cfg.seed, {kInit}));
  nn::Adam adam(cfg.optimizer);
  ReplayBuffer buffer(cfg.buffer_capacity);
  int start_step = 0;
  std::uint64_t games_written = 0;
  std::vector<std::string> metric_lines{metrics_csv_header()};

  if (cfg.resume && fs::exists(latest)) {
    const nn::Archive a = nn::read_archive(latest.string());
    net = nn::network_from_archive(a, cfg.network);
    nn::optimizer_from_archive(a, net, adam);
    const Progress p = progress_of(a);
    start_step = p.step;
    games_written = p.games;
    auto lines = read_lines(games_path);
    if (lines.size() < games_written) throw std::runtime_error("resume: games.jsonl is shorter than the checkpoint");
    lines.resize(games_written);
    write_lines(games_path, lines);
    for (const auto& l : lines) add_record(buffer, source, from_json_line(l));
    auto old = read_lines(metrics_path);
    for (std::size_t i = 1; i < old.size(); ++i) {
      if (std::stoi(old[i].substr(0, old[i].find(','))) <= start_step) metric_lines.push_back(old[i]);
    }
  } else {
    if (init_checkpoint) net = nn::load_network(init_checkpoint->string(), cfg.network);
    std::ofstream(games_path, std::ios::trunc);
  }
  write_lines(metrics_path, metric_lines);
  {
    std::ofstream(dir / "config.txt", std::ios::trunc) << cfg.describe() << '\n';
  }

  TrainingOutcome outcome;
  std::ofstream metrics(metrics_path, std::ios::app);
  auto emit = [&](StepLog& log) {
    metrics << metrics_csv_row(log) << '\n';
    metrics.flush();
    if (cfg.verbose) {
      std::cerr << "step " << log.step << " loss " << log.loss.total << " (policy " << log.loss.policy << ", value "
                << log.loss.value << ") buffer " << log.buffer_games;
      if (log.evaluated) std::cerr << " win_rate_vs_random " << log.eval.win_rate();
      std::cerr << " " << log.seconds << "s\n";
    }
    if (on_step) on_step(log);
    outcome.log.push_back(log);
  };

  if (start_step == 0 && cfg.eval_every > 0) {
    StepLog base;
    base.step = 0;
    base.evaluated = true;
    const auto t0 = std::chrono::steady_clock::now();
    base.eval = evaluate_vs_random(net, source, cfg, derive_seed(cfg.seed, {kEval, 0}));
    base.seconds = seconds_since(t0);
    emit(base);
  }

  NetworkStorage storage(std::make_shared<const nn::Network>(net));
  std::mutex file_mu;
  auto persist = [&](const GameRecord& r) {
    std::lock_guard lock(file_mu);
    append_records(games_path, {r});
    ++games_written;
  };

  // Threaded mode: workers keep at most one step of games ahead of the trainer.
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> async_counter{games_written};
  std::atomic<int> trainer_step{start_step};
  std::mutex wait_mu;
  std::condition_variable cv;
  std::vector<std::thread> workers;
  std::exception_ptr worker_error;
  const bool threaded = cfg.threads > 1;
  if (threaded) {
    for (int w = 0; w < cfg.threads; ++w) {
      workers.emplace_back([&] {
        try {
          while (!stop) {
            const std::uint64_t id = async_counter.fetch_add(1);
            const std::uint64_t allowed = static_cast<std::uint64_t>(trainer_step.load() + 2) * cfg.games_per_step;
            if (id >= allowed) {
              async_counter.fetch_sub(1);
              std::unique_lock lk(wait_mu);
              cv.wait_for(lk, std::chrono::milliseconds(20));
              continue;
            }
            const std::uint64_t seed = derive_seed(cfg.seed, {kSelfPlayAsync, id});
            const auto snapshot = storage.latest();
            auto res = self_play_game(*snapshot, source.for_game(seed), cfg, seed);
            persist(res.record);
            buffer.add(make_buffered_game(res.record, res.states));
            cv.notify_all();
          }
        } catch (...) {
          std::lock_guard lk(wait_mu);
          if (!worker_error) worker_error = std::current_exception();
          stop = true;
          cv.notify_all();
        }
      });
    }
  }
  auto join_workers = [&] {
    stop = true;
    cv.notify_all();
    for (auto& t : workers) t.join();
    workers.clear();
  };

  try {
    for (int step = start_step + 1; step <= cfg.steps; ++step) {
      const auto t0 = std::chrono::steady_clock::now();
      if (threaded) {
        const std::uint64_t need = static_cast<std::uint64_t>(step) * cfg.games_per_step;
        std::unique_lock lk(wait_mu);
        cv.wait(lk, [&] { return stop.load() || buffer.total_added() >= need; });
        if (worker_error) std::rethrow_exception(worker_error);
      } else {
        for (int gi = 0; gi < cfg.games_per_step; ++gi) {
          const std::uint64_t seed = derive_seed(cfg.seed, {kSelfPlay, static_cast<std::uint64_t>(step),
                                                            static_cast<std::uint64_t>(gi)});
          auto res = self_play_game(net, source.for_game(seed), cfg, seed);
          persist(res.record);
          buffer.add(make_buffered_game(std::move(res.record), res.states));
        }
      }
      StepLog log = training_step(buffer, net, adam, cfg, derive_seed(cfg.seed, {kTrain, static_cast<std::uint64_t>(step)}));
      log.step = step;
      storage.publish(net);
      trainer_step = step;
      cv.notify_all();
      if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
        log.evaluated = true;
        log.eval = evaluate_vs_random(net, source, cfg, derive_seed(cfg.seed, {kEval, static_cast<std::uint64_t>(step)}));
      }
      if (step % cfg.checkpoint_every == 0 || step == cfg.steps) {
        std::uint64_t games_now;
        {
          std::lock_guard lock(file_mu);
          games_now = games_written;
        }
        const auto archive = checkpoint_archive(net, adam, step, games_now);
        const fs::path path = ckpt_dir / ("step_" + std::to_string(step) + ".ckpt");
        nn::write_archive(path.string(), archive);
        nn::write_archive(latest.string(), archive);
        outcome.last_checkpoint = path;
      }
      log.seconds = seconds_since(t0);
      emit(log);
      outcome.completed_steps = step;
    }
  } catch (...) {
    join_workers();
    throw;
  }
  join_workers();
  if (outcome.last_checkpoint.empty() && fs::exists(latest)) outcome.last_checkpoint = latest;
  if (outcome.completed_steps == 0) outcome.completed_steps = start_step;
  outcome.network = std::make_shared<const nn::Network>(net);
  return outcome;
}

}  // namespace hexwar::training
