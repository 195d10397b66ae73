#include "hexwar/rules.hpp"

#include <algorithm>
#include <sstream>

namespace hexwar {

const char* to_string(SubPhase p) {
  switch (p) {
    case SubPhase::Reinforcement: return "reinforcement";
    case SubPhase::Movement: return "movement";
    case SubPhase::TargetSelection: return "target_selection";
    case SubPhase::AttackerSelection: return "attacker_selection";
  }
  return "?";
}

const char* to_string(UnitStatus s) {
  switch (s) {
    case UnitStatus::ReadyToMove: return "ready";
    case UnitStatus::Moved: return "moved";
    case UnitStatus::Attacked: return "attacked";
  }
  return "?";
}

const char* to_string(GameResult r) {
  switch (r) {
    case GameResult::P1Win: return "p1_win";
    case GameResult::P2Win: return "p2_win";
    case GameResult::Draw: return "draw";
  }
  return "?";
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Move: return "move";
    case ActionKind::NoMove: return "no_move";
    case ActionKind::PlaceReinforcement: return "place";
    case ActionKind::SelectTarget: return "select_target";
    case ActionKind::SelectAttacker: return "select_attacker";
    case ActionKind::ConfirmAttack: return "confirm_attack";
    case ActionKind::NoAttack: return "no_attack";
  }
  return "?";
}

namespace {

const char* direction_name(Direction d) {
  static constexpr const char* names[] = {"E", "NE", "NW", "W", "SW", "SE"};
  return names[index_of(d)];
}

}  // namespace

std::string describe(const Action& a) {
  std::ostringstream os;
  os << to_string(a.kind) << "(" << a.at.row << "," << a.at.col;
  switch (a.kind) {
    case ActionKind::Move: os << " L" << a.level << " " << direction_name(a.direction); break;
    case ActionKind::NoMove:
    case ActionKind::SelectAttacker:
    case ActionKind::NoAttack: os << " L" << a.level; break;
    default: break;
  }
  os << ")";
  return os.str();
}

int ScenarioSpec::vp_index(HexCoord c) const {
  for (std::size_t i = 0; i < vp_tiles.size(); ++i) {
    if (vp_tiles[i].at == c) return static_cast<int>(i);
  }
  return -1;
}

void ScenarioSpec::validate() const {
  if (height <= 0 || width <= 0) throw RulesError("scenario.dimensions", "height and width must be positive");
  if (stack_limit < 1) throw RulesError("scenario.stack_limit", "S must be >= 1");
  if (reinforcement_window < 0) throw RulesError("scenario.reinforcement_window", "R must be >= 0");
  if (total_turns < 1) throw RulesError("scenario.total_turns", "total_turns must be >= 1");
  if (stack_limit > 255) throw RulesError("scenario.stack_limit", "S must fit in 8 bits");
  if (terrain_types.empty()) throw RulesError("scenario.terrain", "no terrain types");
  if (static_cast<int>(terrain_map.size()) != height * width)
    throw RulesError("scenario.terrain", "terrain map size does not match height x width");
  for (auto t : terrain_map) {
    if (t >= terrain_types.size()) throw RulesError("scenario.terrain", "terrain index out of range");
  }
  for (const auto& t : terrain_types) {
    if (t.movement_cost < 1) throw RulesError("scenario.terrain", "movement_cost must be >= 1 for " + t.name);
    if (t.attack_modifier < 0 || t.defence_modifier < 0)
      throw RulesError("scenario.terrain", "modifiers must be nonnegative for " + t.name);
  }
  for (const auto& u : unit_types) {
    if (u.attack < 0 || u.defence < 0 || u.movement < 0)
      throw RulesError("scenario.units", "unit attributes must be nonnegative for " + u.name);
  }
  auto check_entries = [&](const std::vector<ReinforcementEntry>& list, bool initial) {
    for (const auto& e : list) {
      if (e.unit_type < 0 || e.unit_type >= static_cast<int>(unit_types.size()))
        throw RulesError("scenario.reinforcements", "unknown unit type index");
      if (e.arrival_locations.empty())
        throw RulesError("scenario.reinforcements", "arrival locations must be nonempty");
      for (auto c : e.arrival_locations) {
        if (!on_board(c, height, width)) throw RulesError("scenario.reinforcements", "arrival location off-board");
      }
      if (!initial && (e.arrival_turn < 1 || e.arrival_turn > total_turns))
        throw RulesError("scenario.reinforcements", "arrival_turn must lie in 1..total_turns");
    }
  };
  for (int s = 0; s < 2; ++s) {
    check_entries(initial_reinforcements[s], true);
    check_entries(schedule[s], false);
    for (std::size_t i = 1; i < schedule[s].size(); ++i) {
      if (schedule[s][i].arrival_turn < schedule[s][i - 1].arrival_turn)
        throw RulesError("scenario.reinforcements", "schedule must be ordered by arrival_turn");
    }
  }
  for (std::size_t i = 0; i < vp_tiles.size(); ++i) {
    if (!on_board(vp_tiles[i].at, height, width)) throw RulesError("scenario.vp", "victory tile off-board");
    for (std::size_t j = 0; j < i; ++j) {
      if (vp_tiles[i].at == vp_tiles[j].at) throw RulesError("scenario.vp", "duplicate victory tile");
    }
  }
}

int GameState::unit_count() const {
  int n = 0;
  for (auto c : counts) n += c;
  return n;
}

int GameState::unit_count(Player p) const {
  int n = 0;
  const int s = stack_limit();
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    for (int l = 0; l < counts[cell]; ++l) n += units[cell * s + l].owner == p;
  }
  return n;
}

const ReinforcementEntry& GameState::entry(Player p, ReinforcementRef r) const {
  const int s = seat_index(p);
  return r.initial ? scenario->initial_reinforcements[s][r.index] : scenario->schedule[s][r.index];
}

bool operator==(const GameState& a, const GameState& b) {
  if (a.scenario != b.scenario && !(a.scenario && b.scenario && *a.scenario == *b.scenario)) return false;
  if (a.counts != b.counts || a.turn != b.turn || a.current_player != b.current_player ||
      a.sub_phase != b.sub_phase || a.pregame != b.pregame || a.pending_target != b.pending_target ||
      a.pending_attackers != b.pending_attackers || a.vp_control != b.vp_control ||
      a.pending_reinforcements != b.pending_reinforcements || a.next_scheduled != b.next_scheduled)
    return false;
  // Slots above a stack's height are dead storage; compare occupied levels only.
  const int s = a.stack_limit();
  for (std::size_t cell = 0; cell < a.counts.size(); ++cell) {
    for (int l = 0; l < a.counts[cell]; ++l) {
      if (!(a.units[cell * s + l] == b.units[cell * s + l])) return false;
    }
  }
  return true;
}

bool can_pay_any_step(const GameState& g, HexCoord at, int movement_left) {
  for (Direction d : kAllDirections) {
    auto n = neighbor(at, d, g.height(), g.width());
    if (n && g.spec().terrain_at(*n).movement_cost <= movement_left) return true;
  }
  return false;
}

namespace {

bool has_pending_attacker(const GameState& g, UnitRef r) {
  return std::find(g.pending_attackers.begin(), g.pending_attackers.end(), r) != g.pending_attackers.end();
}

bool adjacent_eligible_attacker(const GameState& g, HexCoord target) {
  for (Direction d : kAllDirections) {
    auto n = neighbor(target, d, g.height(), g.width());
    if (!n) continue;
    for (const Unit& u : g.stack(*n)) {
      if (u.owner == g.current_player && u.status != UnitStatus::Attacked) return true;
    }
  }
  return false;
}

bool in_bounds(const GameState& g, HexCoord c) { return on_board(c, g.height(), g.width()); }

std::optional<std::string> check_friendly_unit(const GameState& g, const Action& a) {
  if (!in_bounds(g, a.at)) return "position off-board";
  if (a.level < 0 || a.level >= g.stack_size(a.at)) return "no unit at that stacking level";
  if (g.unit(a.at, a.level).owner != g.current_player) return "unit belongs to the opponent";
  return std::nullopt;
}

void remove_unit(GameState& g, HexCoord c, int level) {
  const int cell = cell_index(c, g.width());
  const int s = g.stack_limit();
  const int n = g.counts[cell];
  for (int l = level; l + 1 < n; ++l) g.units[cell * s + l] = g.units[cell * s + l + 1];
  g.units[cell * s + n - 1] = Unit{};
  g.counts[cell] = static_cast<std::uint8_t>(n - 1);
}

void push_unit(GameState& g, HexCoord c, const Unit& u) {
  const int cell = cell_index(c, g.width());
  g.units[cell * g.stack_limit() + g.counts[cell]] = u;
  g.counts[cell]++;
  const int vp = g.spec().vp_index(c);
  if (vp >= 0) g.vp_control[vp] = u.owner;
}

void refresh_mobility(GameState& g, HexCoord c, int level) {
  Unit& u = g.unit_mut(c, level);
  if (u.status == UnitStatus::ReadyToMove && !can_pay_any_step(g, c, u.movement_left)) u.status = UnitStatus::Moved;
}

void enqueue_due(GameState& g, Player p) {
  const int s = seat_index(p);
  const auto& sched = g.spec().schedule[s];
  while (g.next_scheduled[s] < static_cast<int>(sched.size()) && sched[g.next_scheduled[s]].arrival_turn <= g.turn) {
    g.pending_reinforcements[s].push_back({false, g.next_scheduled[s]});
    g.next_scheduled[s]++;
  }
}

void begin_turn(GameState& g, Player p) {
  g.current_player = p;
  g.sub_phase = SubPhase::Reinforcement;
  g.pending_target.reset();
  g.pending_attackers.clear();
  const int s = g.stack_limit();
  for (int cell = 0; cell < g.spec().num_cells(); ++cell) {
    for (int l = 0; l < g.counts[cell]; ++l) {
      Unit& u = g.units[cell * s + l];
      if (u.owner != p) continue;
      u.status = UnitStatus::ReadyToMove;
      u.movement_left = u.movement;
    }
  }
  for (int cell = 0; cell < g.spec().num_cells(); ++cell) {
    for (int l = 0; l < g.counts[cell]; ++l) {
      if (g.units[cell * s + l].owner == p) refresh_mobility(g, cell_coord(cell, g.width()), l);
    }
  }
  enqueue_due(g, p);
}

void end_turn(GameState& g) {
  if (g.current_player == Player::P1) {
    begin_turn(g, Player::P2);
    return;
  }
  g.turn++;
  if (g.is_terminal()) {
    g.pending_target.reset();
    g.pending_attackers.clear();
    return;
  }
  begin_turn(g, Player::P1);
}

bool placement_possible(const GameState& g) {
  const auto& queue = g.pending_reinforcements[seat_index(g.current_player)];
  if (queue.empty()) return false;
  const auto& e = g.entry(g.current_player, queue.front());
  for (auto c : e.arrival_locations) {
    if (g.stack_size(c) < g.stack_limit() && g.occupant(c) != other(g.current_player)) return true;
  }
  return false;
}

bool any_ready_unit(const GameState& g) {
  const int s = g.stack_limit();
  for (int cell = 0; cell < g.spec().num_cells(); ++cell) {
    for (int l = 0; l < g.counts[cell]; ++l) {
      const Unit& u = g.units[cell * s + l];
      if (u.owner == g.current_player && u.status == UnitStatus::ReadyToMove) return true;
    }
  }
  return false;
}

bool any_unattacked_unit(const GameState& g) {
  const int s = g.stack_limit();
  for (int cell = 0; cell < g.spec().num_cells(); ++cell) {
    for (int l = 0; l < g.counts[cell]; ++l) {
      const Unit& u = g.units[cell * s + l];
      if (u.owner == g.current_player && u.status != UnitStatus::Attacked) return true;
    }
  }
  return false;
}

// Advances through sub-phases (and turns) in which the current player has no
// decision to make, so every non-terminal state offers at least one action.
void settle(GameState& g) {
  while (!g.is_terminal()) {
    switch (g.sub_phase) {
      case SubPhase::Reinforcement:
        if (placement_possible(g)) return;
        // A blocked front-of-queue unit stays pending for the next turn.
        if (g.pregame) {
          if (g.current_player == Player::P1) {
            g.current_player = Player::P2;
          } else {
            g.pregame = false;
            begin_turn(g, Player::P1);
          }
        } else {
          g.sub_phase = SubPhase::Movement;
        }
        break;
      case SubPhase::Movement:
        if (any_ready_unit(g)) return;
        g.sub_phase = SubPhase::TargetSelection;
        break;
      case SubPhase::TargetSelection:
        if (any_unattacked_unit(g)) return;
        end_turn(g);
        break;
      case SubPhase::AttackerSelection:
        return;
    }
  }
}

}  // namespace

GameState initial_state(ScenarioPtr scenario) {
  if (!scenario) throw RulesError("scenario", "null scenario");
  scenario->validate();
  for (int s = 0; s < 2; ++s) {
    std::vector<HexCoord> locations;
    for (const auto& e : scenario->initial_reinforcements[s]) {
      for (auto c : e.arrival_locations) {
        if (std::find(locations.begin(), locations.end(), c) == locations.end()) locations.push_back(c);
      }
    }
    const std::size_t capacity = locations.size() * static_cast<std::size_t>(scenario->stack_limit);
    if (scenario->initial_reinforcements[s].size() > capacity)
      throw RulesError("scenario.initial_placement",
                       "player " + std::to_string(s + 1) + " has more initial units than S x arrival locations");
  }
  GameState g;
  g.scenario = scenario;
  g.units.assign(static_cast<std::size_t>(scenario->num_cells()) * scenario->stack_limit, Unit{});
  g.counts.assign(scenario->num_cells(), 0);
  g.turn = 1;
  g.current_player = Player::P1;
  g.sub_phase = SubPhase::Reinforcement;
  g.pregame = true;
  g.vp_control.reserve(scenario->vp_tiles.size());
  for (const auto& v : scenario->vp_tiles) g.vp_control.push_back(v.initial_owner);
  for (int s = 0; s < 2; ++s) {
    for (int i = 0; i < static_cast<int>(scenario->initial_reinforcements[s].size()); ++i)
      g.pending_reinforcements[s].push_back({true, i});
  }
  settle(g);
  return g;
}

std::optional<std::string> violation(const GameState& g, const Action& a) {
  if (g.is_terminal()) return "game is over";
  const Player me = g.current_player;
  switch (a.kind) {
    case ActionKind::PlaceReinforcement: {
      if (g.sub_phase != SubPhase::Reinforcement) return "placement only during the reinforcement sub-phase";
      const auto& queue = g.pending_reinforcements[seat_index(me)];
      if (queue.empty()) return "no reinforcement pending";
      if (!in_bounds(g, a.at)) return "position off-board";
      const auto& e = g.entry(me, queue.front());
      if (std::find(e.arrival_locations.begin(), e.arrival_locations.end(), a.at) == e.arrival_locations.end())
        return "not an arrival location of the next reinforcement";
      if (g.occupant(a.at) == other(me)) return "arrival location occupied by the enemy";
      if (g.stack_size(a.at) >= g.stack_limit()) return "stack limit reached";
      return std::nullopt;
    }
    case ActionKind::Move: {
      if (g.sub_phase != SubPhase::Movement) return "moves only during the movement sub-phase";
      if (auto err = check_friendly_unit(g, a)) return err;
      const Unit& u = g.unit(a.at, a.level);
      if (u.status != UnitStatus::ReadyToMove) return "unit is not ready to move";
      if (index_of(a.direction) < 0 || index_of(a.direction) >= kNumDirections) return "invalid direction";
      auto dest = neighbor(a.at, a.direction, g.height(), g.width());
      if (!dest) return "destination off-board";
      if (g.spec().terrain_at(*dest).movement_cost > u.movement_left) return "insufficient movement points";
      if (g.occupant(*dest) == other(me)) return "destination occupied by the enemy";
      if (g.stack_size(*dest) >= g.stack_limit()) return "stack limit reached";
      return std::nullopt;
    }
    case ActionKind::NoMove: {
      if (g.sub_phase != SubPhase::Movement) return "no-move only during the movement sub-phase";
      if (auto err = check_friendly_unit(g, a)) return err;
      if (g.unit(a.at, a.level).status != UnitStatus::ReadyToMove) return "unit is not ready to move";
      return std::nullopt;
    }
    case ActionKind::SelectTarget: {
      if (g.sub_phase != SubPhase::TargetSelection) return "targets only during the target selection sub-phase";
      if (!in_bounds(g, a.at)) return "position off-board";
      if (g.occupant(a.at) != other(me)) return "target is not enemy-occupied";
      if (!adjacent_eligible_attacker(g, a.at)) return "no friendly unit able to attack is adjacent";
      return std::nullopt;
    }
    case ActionKind::SelectAttacker: {
      if (g.sub_phase != SubPhase::AttackerSelection) return "attackers only during the attacker selection sub-phase";
      if (auto err = check_friendly_unit(g, a)) return err;
      if (g.unit(a.at, a.level).status == UnitStatus::Attacked) return "unit already attacked this turn";
      if (!are_adjacent(a.at, *g.pending_target)) return "unit is not adjacent to the target";
      if (has_pending_attacker(g, {a.at, a.level})) return "unit already selected";
      return std::nullopt;
    }
    case ActionKind::ConfirmAttack: {
      if (g.sub_phase != SubPhase::AttackerSelection) return "confirm only during the attacker selection sub-phase";
      if (!g.pending_target || a.at != *g.pending_target) return "confirmation must name the selected target";
      if (g.pending_attackers.empty()) return "at least one attacker must be selected";
      return std::nullopt;
    }
    case ActionKind::NoAttack: {
      if (g.sub_phase != SubPhase::TargetSelection) return "no-attack only during the target selection sub-phase";
      if (auto err = check_friendly_unit(g, a)) return err;
      if (g.unit(a.at, a.level).status == UnitStatus::Attacked) return "unit already attacked this turn";
      return std::nullopt;
    }
  }
  return "unknown action kind";
}

std::vector<Action> legal_actions(const GameState& g) {
  std::vector<Action> out;
  if (g.is_terminal()) return out;
  const int h = g.height();
  const int w = g.width();
  auto keep = [&](const Action& a) {
    if (!violation(g, a)) out.push_back(a);
  };
  switch (g.sub_phase) {
    case SubPhase::Reinforcement: {
      const auto& queue = g.pending_reinforcements[seat_index(g.current_player)];
      if (queue.empty()) break;
      for (auto c : g.entry(g.current_player, queue.front()).arrival_locations) {
        Action a = Action::place(c);
        if (std::find(out.begin(), out.end(), a) == out.end()) keep(a);
      }
      break;
    }
    case SubPhase::Movement:
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const HexCoord at{r, c};
          for (int l = 0; l < g.stack_size(at); ++l) {
            const Unit& u = g.unit(at, l);
            if (u.owner != g.current_player || u.status != UnitStatus::ReadyToMove) continue;
            for (Direction d : kAllDirections) keep(Action::move(at, l, d));
            out.push_back(Action::no_move(at, l));
          }
        }
      }
      break;
    case SubPhase::TargetSelection:
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const HexCoord at{r, c};
          if (g.occupant(at) == other(g.current_player)) keep(Action::select_target(at));
          for (int l = 0; l < g.stack_size(at); ++l) {
            const Unit& u = g.unit(at, l);
            if (u.owner == g.current_player && u.status != UnitStatus::Attacked) out.push_back(Action::no_attack(at, l));
          }
        }
      }
      break;
    case SubPhase::AttackerSelection: {
      const HexCoord target = *g.pending_target;
      for (Direction d : kAllDirections) {
        auto n = neighbor(target, d, h, w);
        if (!n) continue;
        for (int l = 0; l < g.stack_size(*n); ++l) keep(Action::select_attacker(*n, l));
      }
      if (!g.pending_attackers.empty()) out.push_back(Action::confirm_attack(target));
      break;
    }
  }
  return out;
}

CombatOutcome resolve_combat(const GameState& g, HexCoord target, std::span<const UnitRef> attackers) {
  if (attackers.empty()) throw RulesError("combat.attackers", "at least one attacker required");
  if (!in_bounds(g, target)) throw RulesError("combat.target", "target off-board");
  const Player defender = g.occupant(target);
  if (defender == Player::None) throw RulesError("combat.target", "target tile is empty");
  CombatOutcome out;
  for (const UnitRef& r : attackers) {
    if (!in_bounds(g, r.at) || r.level < 0 || r.level >= g.stack_size(r.at))
      throw RulesError("combat.attackers", "attacker reference does not name a unit");
    if (!are_adjacent(r.at, target)) throw RulesError("combat.attackers", "attacker not adjacent to target");
    const Unit& u = g.unit(r.at, r.level);
    if (u.owner == defender) throw RulesError("combat.attackers", "attacker owned by the defender");
    out.attacker_total += u.attack * g.spec().terrain_at(r.at).attack_modifier;
  }
  const double def_mod = g.spec().terrain_at(target).defence_modifier;
  for (const Unit& u : g.stack(target)) out.defender_total += u.defence * def_mod;

  // Strongest: max attack+defence, then lowest stacking level, then row-major tile.
  auto strongest = [&](std::span<const UnitRef> refs) {
    UnitRef best = refs.front();
    for (const UnitRef& r : refs.subspan(1)) {
      const double sr = g.unit(r.at, r.level).strength();
      const double sb = g.unit(best.at, best.level).strength();
      if (sr > sb) {
        best = r;
      } else if (sr == sb) {
        const int tr = cell_index(r.at, g.width());
        const int tb = cell_index(best.at, g.width());
        if (r.level < best.level || (r.level == best.level && tr < tb)) best = r;
      }
    }
    return best;
  };
  std::vector<UnitRef> defenders;
  for (int l = 0; l < g.stack_size(target); ++l) defenders.push_back({target, l});

  if (out.attacker_total <= out.defender_total) out.attacker_losses.push_back(strongest(attackers));
  if (out.defender_total <= out.attacker_total) out.defender_losses.push_back(strongest(defenders));
  return out;
}

GameState apply_action(const GameState& g, const Action& a) {
  if (auto err = violation(g, a)) throw RulesError(std::string(to_string(a.kind)), *err + " [" + describe(a) + "]");
  GameState n = g;
  const Player me = g.current_player;
  switch (a.kind) {
    case ActionKind::PlaceReinforcement: {
      auto& queue = n.pending_reinforcements[seat_index(me)];
      const ReinforcementEntry& e = n.entry(me, queue.front());
      queue.erase(queue.begin());
      const UnitType& t = n.spec().unit_types[e.unit_type];
      Unit u;
      u.type = static_cast<std::uint16_t>(e.unit_type);
      u.owner = me;
      u.attack = t.attack;
      u.defence = t.defence;
      u.movement = t.movement;
      u.movement_left = t.movement;
      u.status = UnitStatus::Moved;
      push_unit(n, a.at, u);
      break;
    }
    case ActionKind::Move: {
      const HexCoord dest = step(a.at, a.direction);
      Unit u = n.unit(a.at, a.level);
      u.movement_left -= n.spec().terrain_at(dest).movement_cost;
      remove_unit(n, a.at, a.level);
      push_unit(n, dest, u);
      refresh_mobility(n, dest, n.stack_size(dest) - 1);
      break;
    }
    case ActionKind::NoMove:
      n.unit_mut(a.at, a.level).status = UnitStatus::Moved;
      break;
    case ActionKind::SelectTarget:
      n.pending_target = a.at;
      n.pending_attackers.clear();
      n.sub_phase = SubPhase::AttackerSelection;
      break;
    case ActionKind::SelectAttacker:
      n.pending_attackers.push_back({a.at, a.level});
      break;
    case ActionKind::ConfirmAttack: {
      const CombatOutcome outcome = resolve_combat(n, a.at, n.pending_attackers);
      for (const UnitRef& r : n.pending_attackers) n.unit_mut(r.at, r.level).status = UnitStatus::Attacked;
      std::vector<UnitRef> losses = outcome.attacker_losses;
      losses.insert(losses.end(), outcome.defender_losses.begin(), outcome.defender_losses.end());
      // Remove higher levels first so lower references stay valid.
      std::sort(losses.begin(), losses.end(), [](const UnitRef& x, const UnitRef& y) { return x.level > y.level; });
      for (const UnitRef& r : losses) remove_unit(n, r.at, r.level);
      n.pending_target.reset();
      n.pending_attackers.clear();
      n.sub_phase = SubPhase::TargetSelection;
      break;
    }
    case ActionKind::NoAttack:
      n.unit_mut(a.at, a.level).status = UnitStatus::Attacked;
      break;
  }
  settle(n);
  return n;
}

std::optional<GameResult> terminal_result(const GameState& g) {
  if (!g.is_terminal()) return std::nullopt;
  int p1 = 0;
  int p2 = 0;
  for (Player p : g.vp_control) {
    p1 += p == Player::P1;
    p2 += p == Player::P2;
  }
  if (p1 > p2) return GameResult::P1Win;
  if (p2 > p1) return GameResult::P2Win;
  return GameResult::Draw;
}

}  // namespace hexwar
