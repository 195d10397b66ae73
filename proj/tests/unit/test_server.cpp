#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "hexwar/agents/spec.hpp"
#include "hexwar/encoding.hpp"
#include "hexwar/nn/checkpoint.hpp"
#include "hexwar/scenario_io.hpp"
#include "hexwar/server/http.hpp"
#include "hexwar/server/session.hpp"
#include "../common/fixtures.hpp"

// After Eigen: httplib pulls in system headers whose macros clash with it.
#include <httplib.h>

using namespace hexwar;
using namespace hexwar::server;
namespace fs = std::filesystem;

namespace {

json seats(const std::string& one, const std::string& two) { return {{"1", one}, {"2", two}}; }

std::string create_id(SessionManager& m, const std::string& scenario, const json& s) {
  const Reply r = m.create({{"scenario", scenario}, {"seats", s}});
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body.value("id", "");
}

// Plays a seeded random legal action through the JSON protocol only.
json random_legal(const json& view, std::mt19937_64& rng) {
  const auto& legal = view["legal_actions"];
  return {{"index", legal[rng() % legal.size()]["index"]}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hexwar_srv_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(AgentSpec, ParsesTheGrammar) {
  using K = agents::AgentSpec::Kind;
  auto s = agents::parse_agent_spec("random");
  EXPECT_EQ(s.kind, K::Random);
  EXPECT_EQ(s.seed, 0u);
  EXPECT_EQ(agents::parse_agent_spec("random:17").seed, 17u);
  EXPECT_EQ(agents::parse_agent_spec("goalrush:3").kind, K::GoalRush);
  s = agents::parse_agent_spec("policy:nets/a.ckpt:30");
  EXPECT_EQ(s.kind, K::Policy);
  EXPECT_EQ(s.checkpoint, "nets/a.ckpt");
  EXPECT_EQ(s.iterations, 30);
  s = agents::parse_agent_spec("mcts:best.ckpt:100");
  EXPECT_EQ(s.kind, K::Mcts);
  EXPECT_EQ(s.simulations, 100);
  EXPECT_EQ(s.iterations, 6);
  s = agents::parse_agent_spec("mcts:best.ckpt:50:12");
  EXPECT_EQ(s.simulations, 50);
  EXPECT_EQ(s.iterations, 12);
  EXPECT_EQ(agents::parse_agent_spec(s.to_string()).to_string(), s.to_string());
}

TEST(AgentSpec, RejectsMalformedSpecs) {
  for (const char* bad : {"", "rand", "random:x", "random:-1", "random:1:2", "policy", "policy:", "policy:a:0",
                          "mcts:a:0", "mcts:a:10:0", "mcts:a:1:2:3", "goalrush:1.5", "human"}) {
    EXPECT_THROW(agents::parse_agent_spec(bad), std::invalid_argument) << bad;
  }
}

TEST(AgentSpec, CheckpointsResolveThroughTheDirectoryAndMustFitTheScenario) {
  const fs::path dir = fresh_dir("ckpt");
  nn::NetworkConfig c;
  c.latent = 8;
  c.stack_limit = 3;
  c.reinforcement_window = 1;
  nn::save_network((dir / "s3.ckpt").string(), nn::Network::random(c, 1));
  c.stack_limit = 2;
  c.reinforcement_window = 2;
  nn::save_network((dir / "s2.ckpt").string(), nn::Network::random(c, 1));
  EXPECT_EQ(agents::resolve_checkpoint("s2.ckpt", dir.string()), (dir / "s2.ckpt").string());
  const ScenarioSpec sym = eval::symmetric_scenario();
  EXPECT_NO_THROW(agents::make_agent(agents::parse_agent_spec("policy:s2.ckpt"), &sym, dir.string()));
  EXPECT_THROW(agents::make_agent(agents::parse_agent_spec("mcts:s3.ckpt:5"), &sym, dir.string()),
               std::invalid_argument);
  EXPECT_THROW(agents::make_agent(agents::parse_agent_spec("policy:missing.ckpt"), &sym, dir.string()),
               nn::CheckpointError);
  ::setenv("HEXWAR_CHECKPOINT_DIR", dir.string().c_str(), 1);
  EXPECT_EQ(agents::resolve_checkpoint("s2.ckpt"), (dir / "s2.ckpt").string());
  ::unsetenv("HEXWAR_CHECKPOINT_DIR");
  fs::remove_all(dir);
}

TEST(Protocol, ActionJsonRoundTripsInBothForms) {
  std::mt19937_64 rng(4);
  const auto sc = std::make_shared<const ScenarioSpec>(eval::symmetric_scenario());
  GameState g = initial_state(sc);
  for (int i = 0; i < 300 && !g.is_terminal(); ++i) {
    for (const auto& a : legal_actions(g)) {
      const json j = action_json(g, a);
      EXPECT_EQ(parse_action(g, j), a);
      EXPECT_EQ(parse_action(g, json{{"index", j["index"]}}), a);
      json symbolic = j;
      symbolic.erase("index");
      EXPECT_EQ(parse_action(g, symbolic), a);
    }
    g = fixtures::random_playout(g, 1, rng);
  }
  EXPECT_THROW(parse_action(g, json{{"index", -1}}), std::invalid_argument);
  EXPECT_THROW(parse_action(g, json{{"kind", "teleport"}, {"row", 0}, {"col", 0}}), std::invalid_argument);
  EXPECT_THROW(parse_action(g, json{{"kind", "move"}, {"row", 0}, {"col", 0}, {"direction", "N"}}),
               std::invalid_argument);
  EXPECT_THROW(parse_action(g, json::array()), std::invalid_argument);
}

TEST(Protocol, ViewLegalSetEqualsTheRulesEngine) {
  std::mt19937_64 rng(8);
  const auto sc = std::make_shared<const ScenarioSpec>(eval::randomized_scenario(3));
  for (int trial = 0; trial < 50; ++trial) {
    const GameState g = fixtures::random_playout(initial_state(sc), static_cast<int>(rng() % 80), rng);
    const json v = state_view(g);
    const auto legal = g.is_terminal() ? std::vector<Action>{} : legal_actions(g);
    ASSERT_EQ(v["legal_actions"].size(), legal.size());
    for (std::size_t i = 0; i < legal.size(); ++i)
      EXPECT_EQ(v["legal_actions"][i]["index"].get<int>(), action_flat_index(g, legal[i]));
    EXPECT_EQ(v["tiles"].size(), static_cast<std::size_t>(g.height() * g.width()));
    int units = 0;
    for (const auto& t : v["tiles"]) units += static_cast<int>(t["units"].size());
    EXPECT_EQ(units, g.unit_count());
  }
}

TEST(Sessions, CreateShowsThePlacementPhase) {
  SessionManager m;
  const Reply r = m.create({{"scenario", "symmetric"}, {"seats", seats("human", "random")}});
  ASSERT_EQ(r.status, 201);
  const json& v = r.body["view"];
  EXPECT_EQ(v["sub_phase"], "reinforcement");
  EXPECT_EQ(v["awaiting"], "human");
  EXPECT_EQ(v["current_player"], 1);
  ASSERT_FALSE(v["legal_actions"].empty());
  for (const auto& a : v["legal_actions"]) EXPECT_EQ(a["kind"], "place");
  EXPECT_EQ(v["tiles"].size(), 25u);
  EXPECT_EQ(v["vp_control"].size(), 2u);
}

TEST(Sessions, RejectsBadRequests) {
  SessionManager m;
  EXPECT_EQ(m.create({{"scenario", "nowhere"}}).status, 400);
  EXPECT_EQ(m.create({{"seats", seats("human", "bogus:1")}}).status, 400);
  EXPECT_EQ(m.create({{"seats", {{"1", "human"}}}}).status, 400);
  EXPECT_EQ(m.view("nope").status, 404);
  EXPECT_EQ(m.submit("nope", {{"index", 0}}).status, 404);
  EXPECT_EQ(m.history("nope").status, 404);
}

TEST(Sessions, IllegalActionIsRejectedWithAReasonAndChangesNothing) {
  SessionManager m;
  const std::string id = create_id(m, "symmetric", seats("human", "human"));
  const json before = m.view(id).body;
  const Reply r = m.submit(id, {{"kind", "move"}, {"row", 0}, {"col", 0}, {"level", 0}, {"direction", "E"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "illegal action");
  EXPECT_FALSE(r.body["reason"].get<std::string>().empty());
  EXPECT_EQ(m.view(id).body, before);
  EXPECT_EQ(m.submit(id, {{"index", 1 << 30}}).status, 400);
  EXPECT_EQ(m.submit(id, {{"what", 1}}).status, 400);
  EXPECT_EQ(m.view(id).body, before);
}

TEST(Sessions, ActingOutOfTurnIsAConflict) {
  SessionManager m;
  const std::string id = create_id(m, "symmetric", seats("random:1", "random:2"));
  const auto s = m.find(id);
  const Reply r = m.submit(id, {{"index", 0}});
  EXPECT_EQ(r.status, 409);
  s->wait_idle();
  EXPECT_TRUE(s->state().is_terminal());
  EXPECT_EQ(m.submit(id, {{"index", 0}}).status, 409);
}

TEST(Sessions, ScriptedGameReachesTheReplayedResult) {
  SessionManager m;
  const std::string id = create_id(m, "symmetric", seats("human", "human"));
  std::mt19937_64 rng(21);
  json v = m.view(id).body;
  int steps = 0;
  while (!v["terminal"].get<bool>()) {
    const Reply r = m.submit(id, random_legal(v, rng));
    ASSERT_EQ(r.status, 200) << r.body.dump();
    v = r.body["view"];
    ASSERT_LT(++steps, 5000);
  }
  const auto s = m.find(id);
  GameState g = initial_state(s->state().scenario);
  for (const auto& a : s->history()) g = apply_action(g, a);
  EXPECT_EQ(g, s->state());
  EXPECT_EQ(v["result"], to_string(*terminal_result(g)));
  const auto events = s->events_since(0, std::chrono::milliseconds(0));
  EXPECT_EQ(events.back()["type"], "terminal");
  EXPECT_EQ(events.back()["result"], v["result"]);
  EXPECT_EQ(m.history(id).body["actions"].size(), s->history().size());
}

TEST(Sessions, AgentRepliesArePushedAsEvents) {
  SessionManager m;
  const std::string id = create_id(m, "symmetric", seats("human", "goalrush:4"));
  const auto s = m.find(id);
  std::mt19937_64 rng(5);
  std::uint64_t seen = 0;
  int agent_moves = 0;
  while (!s->state().is_terminal()) {
    s->wait_idle();
    json v = s->view();
    if (v["terminal"].get<bool>()) break;
    ASSERT_EQ(v["awaiting"], "human");
    ASSERT_EQ(m.submit(id, random_legal(v, rng)).status, 200);
    s->wait_idle();
    for (const auto& e : s->events_since(seen, std::chrono::milliseconds(0))) {
      seen = e["seq"].get<std::uint64_t>();
      if (e["type"] == "action" && e["actor"] == "goalrush:4") {
        ++agent_moves;
        EXPECT_EQ(e["player"], 2);
        EXPECT_TRUE(e["view"].contains("legal_actions"));
      }
    }
  }
  EXPECT_GT(agent_moves, 0);
  GameState g = initial_state(s->state().scenario);
  for (const auto& a : s->history()) g = apply_action(g, a);
  EXPECT_EQ(g, s->state());
}

TEST(Sessions, ConcurrentSessionsStayIsolated) {
  SessionManager m;
  constexpr int kSessions = 6;
  std::vector<std::string> ids;
  std::vector<GameState> mirror;
  for (int i = 0; i < kSessions; ++i) {
    ids.push_back(create_id(m, i % 2 ? "symmetric" : "randomized", seats("human", "human")));
    mirror.push_back(m.find(ids.back())->state());
  }
  std::vector<std::thread> ts;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < kSessions; ++t) {
    ts.emplace_back([&, t] {
      std::mt19937_64 rng(100 + t);
      for (int step = 0; step < 400 && !mirror[t].is_terminal(); ++step) {
        // Poke a random other session with garbage, then move in our own.
        m.submit(ids[rng() % kSessions], {{"index", -5}});
        const auto legal = legal_actions(mirror[t]);
        const Action a = legal[rng() % legal.size()];
        const Reply r = m.submit(ids[t], action_json(mirror[t], a));
        if (r.status != 200) ++mismatches;
        mirror[t] = apply_action(mirror[t], a);
        if (m.find(ids[t])->state() != mirror[t]) ++mismatches;
      }
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  for (int i = 0; i < kSessions; ++i) EXPECT_EQ(m.find(ids[i])->state(), mirror[i]);
}

TEST(Sessions, WriteThroughHistoryReplays) {
  const fs::path dir = fresh_dir("hist");
  ServerOptions opt;
  opt.history_dir = dir;
  SessionManager m(opt);
  const std::string id = create_id(m, "randomized", seats("human", "random:9"));
  const auto s = m.find(id);
  std::mt19937_64 rng(2);
  while (!s->state().is_terminal()) {
    s->wait_idle();
    const json v = s->view();
    if (v["terminal"].get<bool>()) break;
    ASSERT_EQ(m.submit(id, random_legal(v, rng)).status, 200);
  }
  std::ifstream in(dir / (id + ".jsonl"));
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const json header = json::parse(line);
  const auto sc = std::make_shared<const ScenarioSpec>(parse_scenario(header["scenario"].get<std::string>()));
  GameState g = initial_state(sc);
  while (std::getline(in, line)) {
    const int idx = json::parse(line)["index"].get<int>();
    g = apply_action(g, decode_action(unflatten(idx, g.height(), g.width()), g.stack_limit(), g.height(), g.width()));
  }
  EXPECT_TRUE(g.is_terminal());
  EXPECT_EQ(encode_state(g).values().size(), encode_state(s->state()).values().size());
  EXPECT_EQ(terminal_result(g), terminal_result(s->state()));
  EXPECT_EQ(g.units, s->state().units);
  fs::remove_all(dir);
}

TEST(Http, EndToEndOverLoopback) {
  SessionManager m;
  HttpServer http(m);
  const int port = http.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread serving([&] { http.serve(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(10, 0);

  auto health = cli.Get("/api/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto scen = cli.Get("/api/v1/scenarios");
  ASSERT_TRUE(scen);
  EXPECT_EQ(json::parse(scen->body)["scenarios"].size(), 4u);

  auto created = cli.Post("/api/v1/sessions", json({{"scenario", "symmetric"}, {"seats", seats("human", "human")}}).dump(),
                          "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["id"];
  const std::string base = "/api/v1/sessions/" + id;

  auto bad_json = cli.Post(base + "/actions", "{not json", "application/json");
  ASSERT_TRUE(bad_json);
  EXPECT_EQ(bad_json->status, 400);
  auto missing = cli.Get("/api/v1/sessions/unknown");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto illegal = cli.Post(base + "/actions", json({{"kind", "confirm_attack"}, {"row", 0}, {"col", 0}}).dump(),
                          "application/json");
  ASSERT_TRUE(illegal);
  EXPECT_EQ(illegal->status, 400);
  EXPECT_FALSE(json::parse(illegal->body)["reason"].get<std::string>().empty());

  std::mt19937_64 rng(3);
  json v = json::parse(cli.Get(base)->body);
  while (!v["terminal"].get<bool>()) {
    auto r = cli.Post(base + "/actions", random_legal(v, rng).dump(), "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    v = json::parse(r->body)["view"];
  }
  auto polled = cli.Get(base + "/poll?since=0");
  ASSERT_TRUE(polled);
  const json events = json::parse(polled->body)["events"];
  EXPECT_EQ(events.back()["type"], "terminal");

  // The event stream replays everything and closes after the terminal event.
  std::string stream;
  auto sse = cli.Get(base + "/events?since=0", [&](const char* data, std::size_t n) {
    stream.append(data, n);
    return true;
  });
  ASSERT_TRUE(sse);
  EXPECT_EQ(sse->status, 200);
  EXPECT_NE(stream.find("event: created"), std::string::npos);
  EXPECT_NE(stream.find("event: terminal"), std::string::npos);
  std::size_t frames = 0;
  for (std::size_t p = stream.find("id: "); p != std::string::npos; p = stream.find("id: ", p + 1)) ++frames;
  EXPECT_EQ(frames, events.size());

  http.stop();
  serving.join();
}
