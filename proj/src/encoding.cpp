#include "hexwar/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace hexwar {

namespace {

struct Upcoming {
  const ReinforcementEntry* entry;
  int turns_until;
};

// Next R reinforcements of p: due-but-unplaced first, then the schedule.
std::vector<Upcoming> upcoming_reinforcements(const GameState& g, Player p, int limit) {
  std::vector<Upcoming> out;
  const int seat = seat_index(p);
  for (const auto& ref : g.pending_reinforcements[seat]) {
    if (static_cast<int>(out.size()) >= limit) return out;
    out.push_back({&g.entry(p, ref), 0});
  }
  const auto& sched = g.spec().schedule[seat];
  for (int i = g.next_scheduled[seat]; i < static_cast<int>(sched.size()); ++i) {
    if (static_cast<int>(out.size()) >= limit) return out;
    out.push_back({&sched[i], std::max(0, sched[i].arrival_turn - g.turn)});
  }
  return out;
}

void fill_plane(Tensor& t, int channel, float v) {
  const std::size_t plane = static_cast<std::size_t>(t.dim(1)) * t.dim(2);
  std::fill_n(t.data() + channel * plane, plane, v);
}

}  // namespace

void encode_state_into(const GameState& g, Tensor& out) {
  const ScenarioSpec& s = g.spec();
  const StateLayout L{s.stack_limit, s.reinforcement_window};
  const int h = s.height;
  const int w = s.width;
  if (out.rank() != 3 || out.dim(0) != L.channels() || out.dim(1) != h || out.dim(2) != w) {
    out = Tensor({L.channels(), h, w});
  } else {
    out.fill(0.0f);
  }

  for (std::size_t i = 0; i < s.vp_tiles.size(); ++i) {
    const Player owner = g.vp_control[i];
    if (owner == Player::None) continue;
    out.at(L.vp(owner), s.vp_tiles[i].at.row, s.vp_tiles[i].at.col) = 1.0f;
  }

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const HexCoord at{r, c};
      const auto stack = g.stack(at);
      for (int l = 0; l < static_cast<int>(stack.size()); ++l) {
        const Unit& u = stack[l];
        out.at(L.unit(u.owner, u.status, l, 0), r, c) = static_cast<float>(u.attack);
        out.at(L.unit(u.owner, u.status, l, 1), r, c) = static_cast<float>(u.defence);
        out.at(L.unit(u.owner, u.status, l, 2), r, c) = static_cast<float>(u.movement_left);
      }
      const Terrain& t = s.terrain_at(at);
      out.at(L.terrain(0), r, c) = static_cast<float>(t.attack_modifier);
      out.at(L.terrain(1), r, c) = static_cast<float>(t.defence_modifier);
      out.at(L.terrain(2), r, c) = static_cast<float>(t.movement_cost);
    }
  }

  for (Player p : {Player::P1, Player::P2}) {
    const auto upcoming = upcoming_reinforcements(g, p, L.R);
    for (int j = 0; j < static_cast<int>(upcoming.size()); ++j) {
      const UnitType& ut = s.unit_types[upcoming[j].entry->unit_type];
      const float attrs[3] = {static_cast<float>(ut.attack), static_cast<float>(ut.defence),
                              static_cast<float>(ut.movement)};
      const float when = static_cast<float>(s.total_turns - upcoming[j].turns_until);
      for (HexCoord at : upcoming[j].entry->arrival_locations) {
        for (int a = 0; a < 3; ++a) {
          out.at(L.reinforcement_unit(p, j, a), at.row, at.col) = attrs[a];
          out.at(L.reinforcement_time(p, j, a), at.row, at.col) = when;
        }
      }
    }
  }

  if (g.pending_target) out.at(L.combat_target(), g.pending_target->row, g.pending_target->col) = 1.0f;
  for (const UnitRef& ref : g.pending_attackers) out.at(L.combat_attacker(ref.level), ref.at.row, ref.at.col) = 1.0f;

  if (!g.is_terminal()) fill_plane(out, L.sub_phase(g.sub_phase), 1.0f);
  fill_plane(out, L.current_player(), g.current_player == Player::P1 ? 1.0f : -1.0f);
  fill_plane(out, L.turn(), static_cast<float>(g.turn) / static_cast<float>(s.total_turns));
}

Tensor encode_state(const GameState& g) {
  Tensor t;
  encode_state_into(g, t);
  return t;
}

ActionIndex encode_action(const Action& a, int stack_limit) {
  const ActionLayout L{stack_limit};
  int plane = 0;
  switch (a.kind) {
    case ActionKind::Move: plane = L.move(a.direction, a.level); break;
    case ActionKind::SelectTarget: plane = L.select_target(); break;
    case ActionKind::SelectAttacker: plane = L.select_attacker(a.level); break;
    case ActionKind::ConfirmAttack: plane = L.confirm_attack(); break;
    case ActionKind::PlaceReinforcement: plane = L.place(); break;
    case ActionKind::NoMove: plane = L.no_move(a.level); break;
    case ActionKind::NoAttack: plane = L.no_attack(a.level); break;
  }
  return {plane, a.at.row, a.at.col};
}

Action decode_action(ActionIndex idx, int stack_limit, int height, int width) {
  const ActionLayout L{stack_limit};
  if (idx.plane < 0 || idx.plane >= L.planes() || idx.row < 0 || idx.row >= height || idx.col < 0 || idx.col >= width)
    throw std::out_of_range("action index outside the (9S+3) x H x W tensor");
  const HexCoord at{idx.row, idx.col};
  const int S = stack_limit;
  const int p = idx.plane;
  if (p < 6 * S) return Action::move(at, p % S, static_cast<Direction>(p / S));
  if (p == L.select_target()) return Action::select_target(at);
  if (p < L.confirm_attack()) return Action::select_attacker(at, p - (6 * S + 1));
  if (p == L.confirm_attack()) return Action::confirm_attack(at);
  if (p == L.place()) return Action::place(at);
  if (p < L.no_attack(0)) return Action::no_move(at, p - (7 * S + 3));
  return Action::no_attack(at, p - (8 * S + 3));
}

int action_flat_index(const GameState& g, const Action& a) {
  return flat_index(encode_action(a, g.stack_limit()), g.height(), g.width());
}

std::vector<std::pair<int, Action>> indexed_legal_actions(const GameState& g) {
  std::vector<std::pair<int, Action>> out;
  for (const Action& a : legal_actions(g)) out.emplace_back(action_flat_index(g, a), a);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Tensor legality_mask(const GameState& g) {
  Tensor mask({action_planes(g.stack_limit()), g.height(), g.width()});
  for (const auto& [idx, a] : indexed_legal_actions(g)) mask[idx] = 1.0f;
  return mask;
}

}  // namespace hexwar
