#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../common/combat_oracle.hpp"
#include "hexwar/eval/scenarios.hpp"
#include "hexwar/rules.hpp"
#include "../common/fixtures.hpp"

using namespace hexwar;
using namespace hexwar::fixtures;

namespace {

GameState movement_state(const ScenarioSpec& s) {
  GameState g = start(s);
  EXPECT_EQ(g.sub_phase, SubPhase::Movement);
  return g;
}

}  // namespace

TEST(InitialState, SymmetricStartsWithPlacement) {
  const GameState g = start(eval::symmetric_scenario());
  EXPECT_EQ(g.sub_phase, SubPhase::Reinforcement);
  EXPECT_EQ(g.current_player, Player::P1);
  EXPECT_EQ(g.turn, 1);
  EXPECT_TRUE(g.pregame);
  EXPECT_EQ(g.pending_reinforcements[0].size(), 2u);
  EXPECT_EQ(g.pending_reinforcements[1].size(), 2u);
  for (const Action& a : legal_actions(g)) EXPECT_EQ(a.kind, ActionKind::PlaceReinforcement);
}

TEST(InitialState, AsymmetricQueues) {
  const GameState g = start(eval::asymmetric_scenario());
  EXPECT_EQ(g.pending_reinforcements[0].size(), 2u);
  EXPECT_EQ(g.pending_reinforcements[1].size(), 1u);
}

TEST(InitialState, EmptyPlacementGoesStraightToMovement) {
  GameState g = start(open_board(4, 4));
  // No units at all: every sub-phase is empty, so play falls through whole turns.
  EXPECT_TRUE(g.is_terminal());
  ScenarioSpec s = open_board(4, 4);
  s.schedule[0].push_back({eval::kInfantry, 1, {{1, 1}}});
  g = start(s);
  EXPECT_FALSE(g.pregame);
  EXPECT_EQ(g.current_player, Player::P1);
  EXPECT_EQ(g.sub_phase, SubPhase::Reinforcement);
  g = apply_action(g, Action::place({1, 1}));
  // Arrivals do not move on their arrival turn; the unit may still decline combat.
  EXPECT_EQ(g.current_player, Player::P1);
  EXPECT_EQ(g.sub_phase, SubPhase::TargetSelection);
  EXPECT_EQ(legal_actions(g), (std::vector<Action>{Action::no_attack({1, 1}, 0)}));
  g = apply_action(g, Action::no_attack({1, 1}, 0));
  // P2 owns nothing, so the next decision is P1's turn-2 movement.
  EXPECT_EQ(g.turn, 2);
  EXPECT_EQ(g.sub_phase, SubPhase::Movement);
}

TEST(InitialState, PregameOrderThenPlayerOneMoves) {
  GameState g = start(eval::symmetric_scenario());
  g = apply_action(g, Action::place({4, 0}));
  g = apply_action(g, Action::place({4, 1}));
  EXPECT_EQ(g.current_player, Player::P2);
  EXPECT_EQ(g.sub_phase, SubPhase::Reinforcement);
  g = apply_action(g, Action::place({0, 0}));
  g = apply_action(g, Action::place({0, 4}));
  EXPECT_FALSE(g.pregame);
  EXPECT_EQ(g.current_player, Player::P1);
  EXPECT_EQ(g.sub_phase, SubPhase::Movement);
  EXPECT_EQ(g.turn, 1);
  for (const Unit& u : g.stack({4, 0})) EXPECT_EQ(u.status, UnitStatus::ReadyToMove);
}

TEST(InitialState, RejectsOverfullPlacement) {
  ScenarioSpec s = open_board(3, 3, 1);
  s.initial_reinforcements[0].push_back({eval::kInfantry, 0, {{0, 0}}});
  s.initial_reinforcements[0].push_back({eval::kInfantry, 0, {{0, 0}}});
  EXPECT_THROW(start(s), RulesError);
  s.stack_limit = 2;
  EXPECT_NO_THROW(start(s));
}

TEST(LegalActions, LoneUnitOnPlains) {
  ScenarioSpec s = open_board(5, 5);
  s.schedule[1].push_back({eval::kInfantry, 5, {{0, 0}}});  // keeps the game alive
  GameState g = blank(s);
  put(g, {2, 2}, Player::P1);
  g.sub_phase = SubPhase::Movement;
  const auto acts = legal_actions(g);
  int moves = 0, holds = 0;
  for (const auto& a : acts) {
    moves += a.kind == ActionKind::Move;
    holds += a.kind == ActionKind::NoMove;
  }
  EXPECT_EQ(moves, 6);
  EXPECT_EQ(holds, 1);
  EXPECT_EQ(acts.size(), 7u);
}

TEST(LegalActions, CostRuleBlocksExpensiveEntry) {
  ScenarioSpec s = open_board(5, 5);
  s.terrain_types[eval::kSwamp].movement_cost = 2;
  set_terrain(s, {2, 3}, eval::kSwamp);
  GameState g = blank(s);
  put(g, {2, 2}, Player::P1);
  g.unit_mut({2, 2}, 0).movement_left = 1;
  g.sub_phase = SubPhase::Movement;
  const auto acts = legal_actions(g);
  EXPECT_FALSE(contains(acts, Action::move({2, 2}, 0, Direction::E)));
  EXPECT_TRUE(contains(acts, Action::move({2, 2}, 0, Direction::W)));
  EXPECT_EQ(*violation(g, Action::move({2, 2}, 0, Direction::E)), "insufficient movement points");
}

TEST(LegalActions, NoConfirmWithoutAttackers) {
  ScenarioSpec s = open_board(3, 3);
  GameState g = blank(s);
  put(g, {1, 1}, Player::P1, eval::kInfantry, UnitStatus::Moved);
  put(g, {1, 2}, Player::P2);
  g.sub_phase = SubPhase::TargetSelection;
  g = apply_action(g, Action::select_target({1, 2}));
  EXPECT_EQ(g.sub_phase, SubPhase::AttackerSelection);
  auto acts = legal_actions(g);
  EXPECT_FALSE(contains(acts, Action::confirm_attack({1, 2})));
  EXPECT_TRUE(contains(acts, Action::select_attacker({1, 1}, 0)));
  g = apply_action(g, Action::select_attacker({1, 1}, 0));
  acts = legal_actions(g);
  EXPECT_EQ(acts, (std::vector<Action>{Action::confirm_attack({1, 2})}));
}

TEST(LegalActions, EnemyTilesAreImpassableAndStacksCapped) {
  ScenarioSpec s = open_board(3, 3, 1);
  GameState g = blank(s);
  put(g, {1, 1}, Player::P1);
  put(g, {1, 2}, Player::P2);
  put(g, {1, 0}, Player::P1, eval::kInfantry, UnitStatus::Moved);
  g.sub_phase = SubPhase::Movement;
  const auto acts = legal_actions(g);
  EXPECT_FALSE(contains(acts, Action::move({1, 1}, 0, Direction::E)));
  EXPECT_FALSE(contains(acts, Action::move({1, 1}, 0, Direction::W)));
  EXPECT_EQ(*violation(g, Action::move({1, 1}, 0, Direction::E)), "destination occupied by the enemy");
  EXPECT_EQ(*violation(g, Action::move({1, 1}, 0, Direction::W)), "stack limit reached");
}

TEST(ApplyAction, MoveDeductsCostAndKeepsReady) {
  ScenarioSpec s = open_board(5, 5);
  GameState g = blank(s);
  put(g, {2, 2}, Player::P1);
  g.sub_phase = SubPhase::Movement;
  const GameState n = apply_action(g, Action::move({2, 2}, 0, Direction::E));
  ASSERT_EQ(n.stack_size({2, 3}), 1);
  EXPECT_EQ(n.stack_size({2, 2}), 0);
  EXPECT_EQ(n.unit({2, 3}, 0).movement_left, 2);
  EXPECT_EQ(n.unit({2, 3}, 0).status, UnitStatus::ReadyToMove);
  // Original untouched.
  EXPECT_EQ(g.stack_size({2, 2}), 1);
  EXPECT_EQ(g.unit({2, 2}, 0).movement_left, 3);
}

TEST(ApplyAction, ExhaustedUnitBecomesMoved) {
  ScenarioSpec s = open_board(3, 5);
  s.schedule[1].push_back({eval::kInfantry, 5, {{0, 0}}});
  GameState g = blank(s);
  put(g, {1, 0}, Player::P1);
  put(g, {2, 4}, Player::P1, eval::kInfantry, UnitStatus::Moved);
  g.sub_phase = SubPhase::Movement;
  for (int i = 0; i < 3; ++i) g = apply_action(g, Action::move({1, i}, 0, Direction::E));
  // Out of points: the unit is Moved and play moves on to combat.
  EXPECT_EQ(g.unit({1, 3}, 0).status, UnitStatus::Moved);
  EXPECT_EQ(g.sub_phase, SubPhase::TargetSelection);
}

TEST(ApplyAction, MovingOntoFriendlyStacksOnTop) {
  ScenarioSpec s = open_board(3, 3, 2);
  GameState g = blank(s);
  put(g, {1, 1}, Player::P1, eval::kArmour);
  put(g, {1, 2}, Player::P1, eval::kInfantry, UnitStatus::Moved);
  g.sub_phase = SubPhase::Movement;
  g = apply_action(g, Action::move({1, 1}, 0, Direction::E));
  ASSERT_EQ(g.stack_size({1, 2}), 2);
  EXPECT_EQ(g.unit({1, 2}, 1).type, eval::kArmour);
}

TEST(Combat, TwoInfantryTieWithArmour) {
  ScenarioSpec s = open_board(3, 3);
  GameState g = blank(s);
  put(g, {1, 1}, Player::P2, eval::kArmour);
  put(g, {1, 0}, Player::P1);
  put(g, {1, 2}, Player::P1);
  const std::vector<UnitRef> atk = {{{1, 0}, 0}, {{1, 2}, 0}};
  const CombatOutcome o = resolve_combat(g, {1, 1}, atk);
  EXPECT_EQ(o.attacker_total, 4.0);
  EXPECT_EQ(o.defender_total, 4.0);
  ASSERT_EQ(o.attacker_losses.size(), 1u);
  ASSERT_EQ(o.defender_losses.size(), 1u);
  // Equal strength attackers on one level: row-major tile order decides.
  EXPECT_EQ(o.attacker_losses[0], (UnitRef{{1, 0}, 0}));

  g.sub_phase = SubPhase::AttackerSelection;
  g.pending_target = HexCoord{1, 1};
  g.pending_attackers = atk;
  const GameState n = apply_action(g, Action::confirm_attack({1, 1}));
  EXPECT_EQ(n.stack_size({1, 1}), 0);
  EXPECT_EQ(n.stack_size({1, 0}), 0);
  EXPECT_EQ(n.stack_size({1, 2}), 1);
  EXPECT_EQ(n.unit_count(), 1);
}

TEST(Combat, MountainAttackerLoses) {
  ScenarioSpec s = open_board(3, 3);
  set_terrain(s, {1, 0}, eval::kMountain);
  GameState g = blank(s);
  put(g, {1, 0}, Player::P1);
  put(g, {1, 1}, Player::P2);
  const std::vector<UnitRef> atk = {{{1, 0}, 0}};
  const CombatOutcome o = resolve_combat(g, {1, 1}, atk);
  EXPECT_EQ(o.attacker_total, 1.0);
  EXPECT_EQ(o.defender_total, 2.0);
  EXPECT_EQ(o.attacker_losses.size(), 1u);
  EXPECT_TRUE(o.defender_losses.empty());
}

TEST(Combat, ZeroStrengthTieLosesBoth) {
  ScenarioSpec s = open_board(3, 3);
  s.unit_types.push_back({"dummy", 0.0, 0.0, 1});
  GameState g = blank(s);
  put(g, {1, 0}, Player::P1, 2);
  put(g, {1, 1}, Player::P2, 2);
  const std::vector<UnitRef> atk = {{{1, 0}, 0}};
  const CombatOutcome o = resolve_combat(g, {1, 1}, atk);
  EXPECT_EQ(o.attacker_losses.size(), 1u);
  EXPECT_EQ(o.defender_losses.size(), 1u);
}

TEST(Combat, StrongestDefenderInStackDies) {
  ScenarioSpec s = open_board(3, 3);
  GameState g = blank(s);
  put(g, {1, 1}, Player::P2);
  put(g, {1, 1}, Player::P2, eval::kArmour);
  put(g, {1, 0}, Player::P1, eval::kArmour);
  put(g, {1, 2}, Player::P1, eval::kArmour);
  put(g, {0, 1}, Player::P1, eval::kArmour);
  const std::vector<UnitRef> atk = {{{1, 0}, 0}, {{1, 2}, 0}, {{0, 1}, 0}};
  const CombatOutcome o = resolve_combat(g, {1, 1}, atk);
  EXPECT_EQ(o.attacker_total, 12.0);
  EXPECT_EQ(o.defender_total, 6.0);
  EXPECT_TRUE(o.attacker_losses.empty());
  EXPECT_EQ(o.defender_losses, (std::vector<UnitRef>{{{1, 1}, 1}}));
}

TEST(Combat, RejectsBadPreconditions) {
  ScenarioSpec s = open_board(3, 3);
  GameState g = blank(s);
  put(g, {1, 0}, Player::P1);
  put(g, {1, 1}, Player::P2);
  EXPECT_THROW(resolve_combat(g, {1, 1}, {}), RulesError);
  const std::vector<UnitRef> far = {{{1, 0}, 0}};
  EXPECT_THROW(resolve_combat(g, {1, 2}, far), RulesError);  // empty target
  put(g, {2, 2}, Player::P1);
  const std::vector<UnitRef> distant = {{{2, 2}, 0}};
  EXPECT_THROW(resolve_combat(g, {0, 0}, distant), RulesError);
}

TEST(Combat, ExhaustiveOracleAgreement) {
  long long mismatches = 0;
  const long long n = oracle::enumerate_combat_cases([&](const oracle::CombatCase& cc) {
    const std::string err = oracle::check_combat_case(cc);
    if (!err.empty() && mismatches++ < 5) ADD_FAILURE() << err;
  });
  EXPECT_GE(n, 10000);
  EXPECT_EQ(mismatches, 0);
}

TEST(Victory, TerminalResults) {
  ScenarioSpec s = open_board(3, 3);
  s.vp_tiles = {{{0, 0}, Player::P1}, {{2, 2}, Player::None}};
  GameState g = start(s);
  g.turn = 2;
  EXPECT_FALSE(terminal_result(g).has_value());
  g.turn = s.total_turns + 1;
  EXPECT_EQ(terminal_result(g), GameResult::P1Win);
  g.vp_control = {Player::P1, Player::P1};
  EXPECT_EQ(terminal_result(g), GameResult::P1Win);
  g.vp_control = {Player::P1, Player::P2};
  EXPECT_EQ(terminal_result(g), GameResult::Draw);
  g.vp_control = {Player::None, Player::P2};
  EXPECT_EQ(terminal_result(g), GameResult::P2Win);
  g.vp_control = {Player::None, Player::None};
  EXPECT_EQ(terminal_result(g), GameResult::Draw);
}

TEST(Victory, ControlPersistsAfterLeaving) {
  ScenarioSpec s = open_board(3, 5);
  s.vp_tiles = {{{1, 2}, Player::P2}};
  s.schedule[1].push_back({eval::kInfantry, 5, {{0, 0}}});
  GameState g = blank(s);
  put(g, {1, 1}, Player::P1);
  g.sub_phase = SubPhase::Movement;
  g = apply_action(g, Action::move({1, 1}, 0, Direction::E));
  EXPECT_EQ(g.vp_control[0], Player::P1);
  g = apply_action(g, Action::move({1, 2}, 0, Direction::E));
  EXPECT_EQ(g.vp_control[0], Player::P1);
}

TEST(Turns, EndOfTurnResetsTheNextPlayer) {
  ScenarioSpec s = open_board(3, 3);
  GameState g = blank(s);
  put(g, {0, 0}, Player::P1);
  put(g, {2, 2}, Player::P2, eval::kInfantry, UnitStatus::Attacked);
  g.unit_mut({2, 2}, 0).movement_left = 0;
  g.sub_phase = SubPhase::Movement;
  g = apply_action(g, Action::no_move({0, 0}, 0));
  EXPECT_EQ(g.sub_phase, SubPhase::TargetSelection);
  g = apply_action(g, Action::no_attack({0, 0}, 0));
  EXPECT_EQ(g.current_player, Player::P2);
  EXPECT_EQ(g.turn, 1);
  EXPECT_EQ(g.unit({2, 2}, 0).status, UnitStatus::ReadyToMove);
  EXPECT_EQ(g.unit({2, 2}, 0).movement_left, 3);
  g = apply_action(g, Action::no_move({2, 2}, 0));
  g = apply_action(g, Action::no_attack({2, 2}, 0));
  EXPECT_EQ(g.current_player, Player::P1);
  EXPECT_EQ(g.turn, 2);
}

TEST(Reinforcements, ArriveMovedAndBlockedOnesWait) {
  ScenarioSpec s = open_board(3, 3, 1);
  s.schedule[0].push_back({eval::kInfantry, 2, {{0, 0}}});
  GameState g = blank(s);
  put(g, {0, 0}, Player::P2);
  put(g, {2, 2}, Player::P1);
  // Turn 1: nothing due.
  EXPECT_EQ(g.sub_phase, SubPhase::Movement);
  g = apply_action(g, Action::no_move({2, 2}, 0));
  g = apply_action(g, Action::no_attack({2, 2}, 0));
  g = apply_action(g, Action::no_move({0, 0}, 0));
  g = apply_action(g, Action::no_attack({0, 0}, 0));
  // Turn 2: the arrival cell is enemy-held, so the entry waits and play goes on.
  EXPECT_EQ(g.turn, 2);
  EXPECT_EQ(g.sub_phase, SubPhase::Movement);
  EXPECT_EQ(g.pending_reinforcements[0].size(), 1u);
  g = apply_action(g, Action::no_move({2, 2}, 0));
  g = apply_action(g, Action::no_attack({2, 2}, 0));
  g = apply_action(g, Action::move({0, 0}, 0, Direction::E));
  g = apply_action(g, Action::no_move({0, 1}, 0));
  g = apply_action(g, Action::no_attack({0, 1}, 0));
  EXPECT_EQ(g.turn, 3);
  EXPECT_EQ(g.sub_phase, SubPhase::Reinforcement);
  g = apply_action(g, Action::place({0, 0}));
  EXPECT_EQ(g.unit({0, 0}, 0).status, UnitStatus::Moved);
}

TEST(Rules, IllegalActionsNameTheRule) {
  GameState g = start(eval::symmetric_scenario());
  try {
    apply_action(g, Action::move({4, 0}, 0, Direction::E));
    FAIL();
  } catch (const RulesError& e) {
    EXPECT_EQ(e.rule(), "move");
    EXPECT_NE(std::string(e.what()).find("movement sub-phase"), std::string::npos);
  }
  EXPECT_THROW(apply_action(g, Action::place({2, 2})), RulesError);
}

namespace {

struct Scenarios {
  std::vector<ScenarioSpec> list;
  Scenarios() {
    for (auto& [name, s] : eval::builtin_scenarios()) list.push_back(s);
    list.push_back(eval::randomized_scenario(11));
    list.push_back(eval::plains_single_unit_scenario(7, 7, 3));
    ScenarioSpec tall = eval::symmetric_scenario();
    tall.stack_limit = 3;
    tall.reinforcement_window = 3;
    tall.name = "stack3";
    for (int i = 0; i < 2; ++i) tall.initial_reinforcements[i].push_back(tall.initial_reinforcements[i][0]);
    tall.schedule[0].push_back({eval::kArmour, 2, {{4, 2}}});
    tall.schedule[1].push_back({eval::kArmour, 2, {{0, 2}}});
    list.push_back(tall);
  }
};

void check_invariants(const GameState& g) {
  const int S = g.stack_limit();
  for (int cell = 0; cell < g.spec().num_cells(); ++cell) {
    ASSERT_LE(g.counts[cell], S);
    for (int l = 0; l < g.counts[cell]; ++l) {
      const Unit& u = g.units[cell * S + l];
      ASSERT_EQ(u.owner, g.units[cell * S].owner) << "mixed stack";
      ASSERT_GE(u.movement_left, 0);
      ASSERT_LE(u.movement_left, u.movement);
    }
  }
  if (g.sub_phase == SubPhase::AttackerSelection && !g.is_terminal()) {
    ASSERT_TRUE(g.pending_target.has_value());
    for (const auto& r : g.pending_attackers) {
      ASSERT_TRUE(are_adjacent(r.at, *g.pending_target));
      ASSERT_EQ(g.unit(r.at, r.level).owner, g.current_player);
      ASSERT_NE(g.unit(r.at, r.level).status, UnitStatus::Attacked);
    }
  } else {
    ASSERT_FALSE(g.pending_target.has_value());
    ASSERT_TRUE(g.pending_attackers.empty());
  }
}

}  // namespace

TEST(RulesFuzz, InvariantsHoldOnRandomPlay) {
  Scenarios sc;
  std::mt19937_64 rng(17);
  long long steps = 0;
  for (const auto& spec : sc.list) {
    auto ptr = std::make_shared<const ScenarioSpec>(spec);
    for (int game = 0; game < 60; ++game) {
      GameState g = initial_state(ptr);
      std::vector<Action> history;
      while (!g.is_terminal()) {
        check_invariants(g);
        const auto acts = legal_actions(g);
        ASSERT_FALSE(acts.empty());
        for (const auto& a : acts) ASSERT_FALSE(violation(g, a).has_value()) << describe(a);
        // A random syntactically valid action outside the legal set is rejected.
        const ActionIndex bogus{static_cast<int>(rng() % action_planes(g.stack_limit())),
                                static_cast<int>(rng() % g.height()), static_cast<int>(rng() % g.width())};
        const Action b = decode_action(bogus, g.stack_limit(), g.height(), g.width());
        if (!contains(acts, b)) EXPECT_THROW(apply_action(g, b), RulesError) << describe(b);

        const Action a = acts[rng() % acts.size()];
        const GameState before = g;
        const GameState next = apply_action(g, a);
        ASSERT_TRUE(g == before) << "apply_action mutated its argument";
        const int delta = next.unit_count() - g.unit_count();
        if (a.kind == ActionKind::ConfirmAttack) {
          ASSERT_TRUE(delta == -1 || delta == -2);
        } else if (a.kind == ActionKind::PlaceReinforcement) {
          ASSERT_EQ(delta, 1);
        } else {
          ASSERT_EQ(delta, 0);
        }
        if (next.turn == g.turn && next.current_player == g.current_player && !next.is_terminal()) {
          // Same player's turn: unit statuses only move forward.
          for (int cell = 0; cell < next.spec().num_cells(); ++cell) {
            if (a.kind == ActionKind::Move || a.kind == ActionKind::ConfirmAttack) break;
            for (int l = 0; l < next.counts[cell] && l < g.counts[cell]; ++l) {
              ASSERT_GE(static_cast<int>(next.units[cell * g.stack_limit() + l].status),
                        static_cast<int>(g.units[cell * g.stack_limit() + l].status));
            }
          }
        }
        history.push_back(a);
        g = next;
        ++steps;
      }
      ASSERT_TRUE(terminal_result(g).has_value());
      EXPECT_TRUE(legal_actions(g).empty());
      GameState r = initial_state(ptr);
      for (const auto& a : history) r = apply_action(r, a);
      ASSERT_TRUE(r == g) << "replay diverged";
    }
  }
  EXPECT_GT(steps, 10000);
}

TEST(RulesFuzz, StatusMonotonicPerUnitAcrossMoves) {
  // Tracks a single unit through its moves: ReadyToMove -> Moved -> Attacked.
  ScenarioSpec s = open_board(5, 5);
  s.schedule[1].push_back({eval::kInfantry, 5, {{0, 0}}});
  GameState g = blank(s);
  put(g, {2, 0}, Player::P1);
  put(g, {0, 4}, Player::P2, eval::kInfantry, UnitStatus::Moved);
  g.sub_phase = SubPhase::Movement;
  g = apply_action(g, Action::move({2, 0}, 0, Direction::E));
  EXPECT_EQ(g.unit({2, 1}, 0).status, UnitStatus::ReadyToMove);
  g = apply_action(g, Action::no_move({2, 1}, 0));
  EXPECT_EQ(g.unit({2, 1}, 0).status, UnitStatus::Moved);
  EXPECT_EQ(g.sub_phase, SubPhase::TargetSelection);
  g = apply_action(g, Action::no_attack({2, 1}, 0));
  EXPECT_EQ(g.current_player, Player::P2);
}
