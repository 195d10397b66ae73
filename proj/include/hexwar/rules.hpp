#pragma once

// Rules engine: terrain, units, stacking, the four sub-phase turn machine,
// group combat, reinforcements and victory.
//
// GameState is a value type. apply_action() never mutates its argument, so a
// state can be shared read-only between search trees and self-play workers.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexwar/hexgrid.hpp"

namespace hexwar {

enum class Player : std::uint8_t { None = 0, P1 = 1, P2 = 2 };

constexpr Player other(Player p) { return p == Player::P1 ? Player::P2 : Player::P1; }
constexpr int seat_index(Player p) { return p == Player::P2 ? 1 : 0; }

enum class UnitStatus : std::uint8_t { ReadyToMove = 0, Moved = 1, Attacked = 2 };

enum class SubPhase : std::uint8_t {
  Reinforcement = 0,
  Movement = 1,
  TargetSelection = 2,
  AttackerSelection = 3,
};

enum class GameResult : std::uint8_t { P1Win, P2Win, Draw };

/// +1 / -1 / 0 from player one's point of view.
constexpr double result_value(GameResult r) {
  return r == GameResult::P1Win ? 1.0 : (r == GameResult::P2Win ? -1.0 : 0.0);
}

const char* to_string(SubPhase p);
const char* to_string(UnitStatus s);
const char* to_string(GameResult r);

/// Per-game rule violation (illegal action, malformed scenario, ...). `rule`
/// names the precondition that failed.
class RulesError : public std::runtime_error {
 public:
  RulesError(std::string rule, const std::string& detail)
      : std::runtime_error(rule + ": " + detail), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

struct Terrain {
  std::string name;
  char symbol = '.';
  double attack_modifier = 1.0;
  double defence_modifier = 1.0;
  int movement_cost = 1;
  bool yields_vp = false;

  friend bool operator==(const Terrain&, const Terrain&) = default;
};

struct UnitType {
  std::string name;
  double attack = 0.0;
  double defence = 0.0;
  int movement = 0;

  friend bool operator==(const UnitType&, const UnitType&) = default;
};

struct Unit {
  std::uint16_t type = 0;  // index into ScenarioSpec::unit_types
  Player owner = Player::None;
  UnitStatus status = UnitStatus::ReadyToMove;
  double attack = 0.0;
  double defence = 0.0;
  int movement = 0;
  int movement_left = 0;

  double strength() const { return attack + defence; }
  friend bool operator==(const Unit&, const Unit&) = default;
};

struct ReinforcementEntry {
  int unit_type = 0;
  int arrival_turn = 0;  // 0 for pre-game placements
  std::vector<HexCoord> arrival_locations;

  friend bool operator==(const ReinforcementEntry&, const ReinforcementEntry&) = default;
};

struct VictoryTile {
  HexCoord at;
  Player initial_owner = Player::None;

  friend bool operator==(const VictoryTile&, const VictoryTile&) = default;
};

struct ScenarioSpec {
  std::string name = "unnamed";
  int height = 0;
  int width = 0;
  std::vector<Terrain> terrain_types;
  std::vector<std::uint8_t> terrain_map;  // row-major terrain_types indices
  std::vector<UnitType> unit_types;
  // Indexed by seat_index(player).
  std::array<std::vector<ReinforcementEntry>, 2> initial_reinforcements;
  std::array<std::vector<ReinforcementEntry>, 2> schedule;
  std::vector<VictoryTile> vp_tiles;
  int total_turns = 1;
  int stack_limit = 1;            // S
  int reinforcement_window = 1;   // R

  const Terrain& terrain_at(HexCoord c) const {
    return terrain_types[terrain_map[cell_index(c, width)]];
  }
  int num_cells() const { return height * width; }
  /// Index into vp_tiles, or -1.
  int vp_index(HexCoord c) const;

  /// Throws RulesError describing the first structural problem found.
  void validate() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

using ScenarioPtr = std::shared_ptr<const ScenarioSpec>;

enum class ActionKind : std::uint8_t {
  Move,
  NoMove,
  PlaceReinforcement,
  SelectTarget,
  SelectAttacker,
  ConfirmAttack,
  NoAttack,
};

const char* to_string(ActionKind k);

struct Action {
  ActionKind kind = ActionKind::NoMove;
  HexCoord at;
  int level = 0;                       // Move, NoMove, SelectAttacker, NoAttack
  Direction direction = Direction::E;  // Move

  static Action move(HexCoord from, int level, Direction d) { return {ActionKind::Move, from, level, d}; }
  static Action no_move(HexCoord at, int level) { return {ActionKind::NoMove, at, level, Direction::E}; }
  static Action place(HexCoord at) { return {ActionKind::PlaceReinforcement, at, 0, Direction::E}; }
  static Action select_target(HexCoord at) { return {ActionKind::SelectTarget, at, 0, Direction::E}; }
  static Action select_attacker(HexCoord at, int level) {
    return {ActionKind::SelectAttacker, at, level, Direction::E};
  }
  static Action confirm_attack(HexCoord at) { return {ActionKind::ConfirmAttack, at, 0, Direction::E}; }
  static Action no_attack(HexCoord at, int level) { return {ActionKind::NoAttack, at, level, Direction::E}; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string describe(const Action& a);

struct UnitRef {
  HexCoord at;
  int level = 0;
  friend bool operator==(const UnitRef&, const UnitRef&) = default;
  friend auto operator<=>(const UnitRef&, const UnitRef&) = default;
};

/// Reference to a scenario reinforcement entry (pre-game list or schedule).
struct ReinforcementRef {
  bool initial = false;
  int index = 0;
  friend bool operator==(const ReinforcementRef&, const ReinforcementRef&) = default;
};

struct CombatOutcome {
  double attacker_total = 0.0;
  double defender_total = 0.0;
  std::vector<UnitRef> attacker_losses;
  std::vector<UnitRef> defender_losses;
};

struct GameState {
  ScenarioPtr scenario;
  // units[cell * S + level]; counts[cell] units stacked on the cell.
  std::vector<Unit> units;
  std::vector<std::uint8_t> counts;
  int turn = 1;
  Player current_player = Player::P1;
  SubPhase sub_phase = SubPhase::Reinforcement;
  bool pregame = true;
  std::optional<HexCoord> pending_target;
  std::vector<UnitRef> pending_attackers;
  std::vector<Player> vp_control;  // parallel to scenario->vp_tiles
  std::array<std::vector<ReinforcementRef>, 2> pending_reinforcements;
  std::array<int, 2> next_scheduled{0, 0};  // first schedule entry not yet enqueued

  const ScenarioSpec& spec() const { return *scenario; }
  int height() const { return scenario->height; }
  int width() const { return scenario->width; }
  int stack_limit() const { return scenario->stack_limit; }

  int stack_size(HexCoord c) const { return counts[cell_index(c, width())]; }
  std::span<const Unit> stack(HexCoord c) const {
    const int cell = cell_index(c, width());
    return {units.data() + cell * stack_limit(), counts[cell]};
  }
  const Unit& unit(HexCoord c, int level) const {
    return units[cell_index(c, width()) * stack_limit() + level];
  }
  Unit& unit_mut(HexCoord c, int level) { return units[cell_index(c, width()) * stack_limit() + level]; }
  /// Owner of the stack on c, Player::None when empty.
  Player occupant(HexCoord c) const { return stack_size(c) ? unit(c, 0).owner : Player::None; }
  bool is_terminal() const { return turn > scenario->total_turns; }
  int unit_count() const;
  int unit_count(Player p) const;
  const ReinforcementEntry& entry(Player p, ReinforcementRef r) const;

  friend bool operator==(const GameState& a, const GameState& b);
};

GameState initial_state(ScenarioPtr scenario);

std::vector<Action> legal_actions(const GameState& g);

/// Reason why `a` is illegal in g, or nullopt when it is legal.
std::optional<std::string> violation(const GameState& g, const Action& a);

/// Successor state. Throws RulesError naming the violated rule for illegal actions.
GameState apply_action(const GameState& g, const Action& a);

/// Combat arithmetic without side effects.
CombatOutcome resolve_combat(const GameState& g, HexCoord target, std::span<const UnitRef> attackers);

std::optional<GameResult> terminal_result(const GameState& g);

/// True when the unit standing on `at` can pay the movement cost of at least
/// one on-board neighbour.
bool can_pay_any_step(const GameState& g, HexCoord at, int movement_left);

}  // namespace hexwar
