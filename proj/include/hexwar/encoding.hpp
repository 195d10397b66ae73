#pragma once

// Tensor views of game states and actions.
//
// State: C x H x W with C = 19S + 12(R+1), positions represented statically
// (player channels never swap with the side to move).
//
//   per player p in {1,2}, block of 1 + 9S + 6R channels:
//     [0]                        VP tiles controlled by p (one-hot)
//     [1 + g*3S + l*3 + a]       unit planes: status g x level l x {attack, defence, movement left}
//     [1 + 9S + j*3 + a]         j-th upcoming reinforcement, attribute a, at arrival cells
//     [1 + 9S + 3R + j*3 + a]    total_turns - turns until arrival, same cells
//   terrain (3)                  attack modifier, defence modifier, movement cost
//   combat (S+1)                 pending target, selected attackers per level
//   sub-phase (4)                whole-plane one-hot
//   current player (1)           +1 / -1
//   turn (1)                     turn / total_turns
//
// Actions: (9S+3) x H x W planes
//   Move dir d level l: d*S + l | SelectTarget: 6S | SelectAttacker l: 6S+1+l
//   ConfirmAttack: 7S+1 | PlaceReinforcement: 7S+2 | NoMove l: 7S+3+l | NoAttack l: 8S+3+l

#include <utility>
#include <vector>

#include "hexwar/rules.hpp"
#include "hexwar/tensor.hpp"

namespace hexwar {

struct StateLayout {
  int S;
  int R;

  int per_player() const { return 1 + 9 * S + 6 * R; }
  int player_base(Player p) const { return seat_index(p) * per_player(); }
  int vp(Player p) const { return player_base(p); }
  int unit(Player p, UnitStatus status, int level, int attr) const {
    return player_base(p) + 1 + static_cast<int>(status) * 3 * S + level * 3 + attr;
  }
  int reinforcement_unit(Player p, int j, int attr) const { return player_base(p) + 1 + 9 * S + j * 3 + attr; }
  int reinforcement_time(Player p, int j, int attr) const {
    return player_base(p) + 1 + 9 * S + 3 * R + j * 3 + attr;
  }
  int shared_base() const { return 2 * per_player(); }
  int terrain(int attr) const { return shared_base() + attr; }
  int combat_target() const { return shared_base() + 3; }
  int combat_attacker(int level) const { return shared_base() + 4 + level; }
  int sub_phase(SubPhase p) const { return shared_base() + 4 + S + static_cast<int>(p); }
  int current_player() const { return shared_base() + 8 + S; }
  int turn() const { return shared_base() + 9 + S; }
  int channels() const { return shared_base() + 10 + S; }
};

/// 19S + 12(R+1).
constexpr int state_channels(int S, int R) { return 19 * S + 12 * (R + 1); }
/// 9S + 3.
constexpr int action_planes(int S) { return 9 * S + 3; }

struct ActionIndex {
  int plane = 0;
  int row = 0;
  int col = 0;
  friend bool operator==(const ActionIndex&, const ActionIndex&) = default;
};

struct ActionLayout {
  int S;

  int planes() const { return action_planes(S); }
  int move(Direction d, int level) const { return index_of(d) * S + level; }
  int select_target() const { return 6 * S; }
  int select_attacker(int level) const { return 6 * S + 1 + level; }
  int confirm_attack() const { return 7 * S + 1; }
  int place() const { return 7 * S + 2; }
  int no_move(int level) const { return 7 * S + 3 + level; }
  int no_attack(int level) const { return 8 * S + 3 + level; }
};

Tensor encode_state(const GameState& g);
/// Writes the encoding into `out` (resized as needed); avoids reallocation in hot loops.
void encode_state_into(const GameState& g, Tensor& out);

ActionIndex encode_action(const Action& a, int stack_limit);
/// Throws std::out_of_range when the index lies outside the tensor shape.
Action decode_action(ActionIndex idx, int stack_limit, int height, int width);

inline int flat_index(ActionIndex i, int height, int width) { return (i.plane * height + i.row) * width + i.col; }
inline ActionIndex unflatten(int flat, int height, int width) {
  return {flat / (height * width), (flat / width) % height, flat % width};
}
int action_flat_index(const GameState& g, const Action& a);

/// Legal actions paired with their flat tensor index, ascending by index.
std::vector<std::pair<int, Action>> indexed_legal_actions(const GameState& g);

/// Binary (9S+3) x H x W tensor with ones exactly at legal action indices.
Tensor legality_mask(const GameState& g);

}  // namespace hexwar
