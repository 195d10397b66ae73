#include <gtest/gtest.h>

#include <filesystem>

#include "hexwar/eval/scenarios.hpp"
#include "hexwar/scenario_io.hpp"

using namespace hexwar;

TEST(ScenarioIo, RoundTripIsIdentity) {
  auto all = eval::builtin_scenarios();
  all["plains"] = eval::plains_single_unit_scenario(8, 6, 4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) all["rand" + std::to_string(seed)] = eval::randomized_scenario(seed);
  for (const auto& [name, s] : all) {
    const std::string text = serialize_scenario(s);
    const ScenarioSpec back = parse_scenario(text);
    EXPECT_EQ(back, s) << name;
    EXPECT_EQ(serialize_scenario(back), text) << name;
  }
}

TEST(ScenarioIo, RealsSurviveExactly) {
  ScenarioSpec s = eval::symmetric_scenario();
  s.terrain_types[0].attack_modifier = 0.1 + 0.2;
  s.unit_types[0].defence = 1.0 / 3.0;
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
}

TEST(ScenarioIo, ShippedFilesMatchBuiltins) {
  const std::filesystem::path dir = std::filesystem::path(HEXWAR_SOURCE_DIR) / "scenarios";
  for (const auto& [name, s] : eval::builtin_scenarios()) {
    const ScenarioSpec f = load_scenario_file(dir / (name + ".txt"));
    EXPECT_EQ(f, s) << name;
  }
}

TEST(ScenarioIo, CommentsAndVpTerrain) {
  const std::string text = R"(# a tiny board
scenario tiny
size 2 3
turns 2
stack_limit 1
reinforcement_window 0
terrain plains symbol=. attack=1 defence=1 cost=1
terrain town symbol=T attack=1 defence=1.5 cost=1 vp=true
unit infantry attack=2 defence=2 movement=3
map
. T .
 . . .
end
initial 1 infantry at=1,0   # one unit
)";
  const ScenarioSpec s = parse_scenario(text);
  EXPECT_EQ(s.height, 2);
  EXPECT_EQ(s.width, 3);
  ASSERT_EQ(s.vp_tiles.size(), 1u);
  EXPECT_EQ(s.vp_tiles[0].at, (HexCoord{0, 1}));
  EXPECT_EQ(s.vp_tiles[0].initial_owner, Player::None);
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
}

TEST(ScenarioIo, ErrorsCarryLineNumbers) {
  try {
    parse_scenario("scenario x\nsize 2 two\n");
    FAIL();
  } catch (const ScenarioParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_scenario("scenario x\nsize 1 1\nturns 1\nbogus 3\n"), ScenarioParseError);
  // Structurally invalid (no terrain) specs are rejected too.
  EXPECT_ANY_THROW(parse_scenario("scenario x\nsize 1 1\nturns 1\n"));
}
