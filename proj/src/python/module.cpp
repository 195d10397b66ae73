#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hexwar/agents/spec.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/eval/match.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/mcts/search.hpp"
#include "hexwar/nn/checkpoint.hpp"
#include "hexwar/scenario_io.hpp"
#include "hexwar/server/session.hpp"
#include "hexwar/training/trainer.hpp"

namespace py = pybind11;
using namespace hexwar;

namespace {

py::array_t<float> to_numpy(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<float> out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

ScenarioPtr scenario_ptr(const std::string& name_or_path, std::uint64_t seed) {
  return eval::resolve_scenario(name_or_path).for_game(seed);
}

py::dict stats_dict(const eval::WinRateStats& s) {
  py::dict d;
  d["games"] = s.games;
  d["p1_wins"] = s.p1_wins;
  d["p2_wins"] = s.p2_wins;
  d["draws"] = s.draws;
  d["ply_capped"] = s.ply_capped;
  d["valid"] = s.valid;
  d["error"] = s.error;
  const auto ci = s.p1_win_interval();
  d["p1_win_rate"] = s.p1_win_rate();
  d["p1_win_interval"] = py::make_tuple(ci.low, ci.high);
  return d;
}

}  // namespace

PYBIND11_MODULE(_hexwar, m) {
  m.doc() = "Hex and counter wargame engine, networks, search and self-play";

  m.def("state_channels", &state_channels, py::arg("stack_limit"), py::arg("reinforcement_window"));
  m.def("action_planes", &action_planes, py::arg("stack_limit"));
  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const auto& [n, s] : eval::builtin_scenarios()) names.push_back(n);
    return names;
  });

  py::class_<HexCoord>(m, "HexCoord")
      .def(py::init<int, int>(), py::arg("row"), py::arg("col"))
      .def_readwrite("row", &HexCoord::row)
      .def_readwrite("col", &HexCoord::col)
      .def("__eq__", [](HexCoord a, HexCoord b) { return a == b; })
      .def("__repr__", [](HexCoord c) { return "HexCoord(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")"; });

  py::class_<Action>(m, "Action")
      .def_property_readonly("kind", [](const Action& a) { return std::string(to_string(a.kind)); })
      .def_readonly("at", &Action::at)
      .def_readonly("level", &Action::level)
      .def_property_readonly("direction", [](const Action& a) { return static_cast<int>(a.direction); })
      .def("__eq__", [](const Action& a, const Action& b) { return a == b; })
      .def("__repr__", [](const Action& a) { return describe(a); });

  py::class_<GameState>(m, "GameState")
      .def_property_readonly("turn", [](const GameState& g) { return g.turn; })
      .def_property_readonly("current_player", [](const GameState& g) { return static_cast<int>(g.current_player); })
      .def_property_readonly("sub_phase", [](const GameState& g) { return std::string(to_string(g.sub_phase)); })
      .def_property_readonly("height", &GameState::height)
      .def_property_readonly("width", &GameState::width)
      .def_property_readonly("stack_limit", &GameState::stack_limit)
      .def_property_readonly("reinforcement_window", [](const GameState& g) { return g.spec().reinforcement_window; })
      .def("is_terminal", &GameState::is_terminal)
      .def("result", [](const GameState& g) -> std::optional<std::string> {
        const auto r = terminal_result(g);
        return r ? std::optional<std::string>(to_string(*r)) : std::nullopt;
      })
      .def("legal_actions", [](const GameState& g) { return legal_actions(g); })
      .def("apply", [](const GameState& g, const Action& a) { return apply_action(g, a); }, py::arg("action"))
      .def("violation", [](const GameState& g, const Action& a) { return violation(g, a); }, py::arg("action"))
      .def("encode", [](const GameState& g) { return to_numpy(encode_state(g)); })
      .def("legality_mask", [](const GameState& g) { return to_numpy(legality_mask(g)); })
      .def("action_index", [](const GameState& g, const Action& a) { return action_flat_index(g, a); }, py::arg("action"))
      .def("decode_action", [](const GameState& g, int flat) {
        return decode_action(unflatten(flat, g.height(), g.width()), g.stack_limit(), g.height(), g.width());
      }, py::arg("index"))
      .def("to_json", [](const GameState& g) { return server::state_view(g).dump(); });

  m.def("initial_state", [](const std::string& scenario, std::uint64_t seed) {
    return initial_state(scenario_ptr(scenario, seed));
  }, py::arg("scenario") = "symmetric", py::arg("seed") = 0,
        "New game for a builtin scenario name, plainsHxW or a scenario file path.");
  m.def("scenario_json", [](const std::string& scenario, std::uint64_t seed) {
    return serialize_scenario(*scenario_ptr(scenario, seed));
  }, py::arg("scenario"), py::arg("seed") = 0);

  py::class_<nn::Network, std::shared_ptr<nn::Network>>(m, "Network")
      .def_static("random", [](int stack_limit, int window, int latent, const std::string& arch, std::uint64_t seed) {
        nn::NetworkConfig c;
        c.stack_limit = stack_limit;
        c.reinforcement_window = window;
        c.latent = latent;
        c.arch = arch == "residual" ? nn::Architecture::Residual : nn::Architecture::Recurrent;
        return std::make_shared<nn::Network>(nn::Network::random(c, seed));
      }, py::arg("stack_limit"), py::arg("reinforcement_window"), py::arg("latent") = 64,
         py::arg("arch") = "recurrent", py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) { return std::make_shared<nn::Network>(nn::load_network(path)); })
      .def("save", [](const nn::Network& n, const std::string& path) { nn::save_network(path, n); })
      .def_property_readonly("stack_limit", [](const nn::Network& n) { return n.config().stack_limit; })
      .def_property_readonly("reinforcement_window", [](const nn::Network& n) { return n.config().reinforcement_window; })
      .def("forward", [](const nn::Network& n, const GameState& g, int iterations) {
        const auto out = n.forward(encode_state(g), iterations);
        return py::make_tuple(to_numpy(out.policy_logits), out.value);
      }, py::arg("state"), py::arg("iterations") = 6, "Policy logits (planes, H, W) and the value from player one's side.");

  m.def("search", [](std::shared_ptr<nn::Network> net, const GameState& g, int simulations, int iterations,
                     std::uint64_t seed) {
    mcts::NetworkEvaluator ev(net, iterations);
    mcts::SearchConfig cfg;
    cfg.simulations = simulations;
    std::mt19937_64 rng(seed);
    const auto r = mcts::run_search(g, ev, cfg, rng);
    py::list out;
    for (std::size_t i = 0; i < r.legal.size(); ++i) out.append(py::make_tuple(r.legal[i].second, r.visits[i]));
    return out;
  }, py::arg("network"), py::arg("state"), py::arg("simulations") = 100, py::arg("iterations") = 6, py::arg("seed") = 0,
     "Root visit counts as (action, visits) pairs.");

  py::class_<agents::Agent, std::shared_ptr<agents::Agent>>(m, "Agent")
      .def_property_readonly("name", &agents::Agent::name)
      .def("choose", [](const agents::Agent& a, const GameState& g, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return a.choose(g, rng);
      }, py::arg("state"), py::arg("seed") = 0);

  m.def("make_agent", [](const std::string& spec, const std::string& scenario) {
    const ScenarioPtr sc = scenario_ptr(scenario, 0);
    return std::const_pointer_cast<agents::Agent>(agents::make_agent(agents::parse_agent_spec(spec), sc.get()));
  }, py::arg("spec"), py::arg("scenario") = "symmetric",
        "Agent from random[:seed], policy:<ckpt>[:iters], mcts:<ckpt>[:sims[:iters]] or goalrush[:seed].");

  m.def("play_match", [](const std::string& p1, const std::string& p2, const std::string& scenario, int games,
                         std::uint64_t seed, int threads) {
    const auto source = eval::resolve_scenario(scenario);
    const ScenarioPtr probe = source.for_game(0);
    const auto a1 = agents::make_agent(agents::parse_agent_spec(p1), probe.get());
    const auto a2 = agents::make_agent(agents::parse_agent_spec(p2), probe.get());
    eval::MatchOptions opt;
    opt.games = games;
    opt.seed = seed;
    opt.threads = threads;
    eval::MatchResult r;
    {
      py::gil_scoped_release release;
      r = eval::play_match(*a1, *a2, source, opt);
    }
    return stats_dict(r.stats);
  }, py::arg("p1"), py::arg("p2"), py::arg("scenario") = "symmetric", py::arg("games") = 100, py::arg("seed") = 0,
        py::arg("threads") = 1);

  m.def("train", [](const std::string& scenario, const std::filesystem::path& output, int steps, int latent,
                    int games_per_step, int simulations, int updates, int batch, int max_iterations, std::uint64_t seed,
                    int threads) {
    training::TrainConfig cfg;
    cfg.network.latent = latent;
    cfg.steps = steps;
    cfg.games_per_step = games_per_step;
    cfg.search.simulations = simulations;
    cfg.updates_per_step = updates;
    cfg.batch_size = batch;
    cfg.max_iterations = max_iterations;
    cfg.checkpoint_every = std::max(1, steps);
    cfg.eval_every = 0;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.output_dir = output;
    py::gil_scoped_release release;
    const auto out = training::run_training(eval::resolve_scenario(scenario), cfg);
    return out.last_checkpoint.string();
  }, py::arg("scenario"), py::arg("output"), py::arg("steps") = 10, py::arg("latent") = 32,
        py::arg("games_per_step") = 8, py::arg("simulations") = 50, py::arg("updates") = 8, py::arg("batch") = 128,
        py::arg("max_iterations") = 6, py::arg("seed") = 0, py::arg("threads") = 1,
        "Self-play training run; returns the path of the last checkpoint.");
}
