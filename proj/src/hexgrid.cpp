#include "hexwar/hexgrid.hpp"

#include <cstdlib>

namespace hexwar {

namespace {

struct Axial {
  int q;
  int r;
};

Axial to_axial(HexCoord c) { return {c.col - (c.row - (c.row & 1)) / 2, c.row}; }

}  // namespace

std::optional<HexCoord> neighbor(HexCoord c, Direction d, int height, int width) {
  const HexCoord n = step(c, d);
  if (!on_board(n, height, width)) return std::nullopt;
  return n;
}

int hex_distance(HexCoord a, HexCoord b) {
  const Axial x = to_axial(a);
  const Axial y = to_axial(b);
  const int dq = x.q - y.q;
  const int dr = x.r - y.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

std::vector<HexCoord> hex_neighborhood(HexCoord c, int radius, int height, int width) {
  std::vector<HexCoord> out;
  if (on_board(c, height, width)) out.push_back(c);
  for (int k = 1; k <= radius; ++k) {
    HexCoord cur = c;
    for (int i = 0; i < k; ++i) cur = step(cur, Direction::E);
    // Walk the ring: from the east corner, sides run NW, W, SW, SE, E, NE.
    static constexpr std::array<Direction, 6> sides = {Direction::NW, Direction::W,  Direction::SW,
                                                       Direction::SE, Direction::E,  Direction::NE};
    for (Direction side : sides) {
      for (int i = 0; i < k; ++i) {
        if (on_board(cur, height, width)) out.push_back(cur);
        cur = step(cur, side);
      }
    }
  }
  return out;
}

bool are_adjacent(HexCoord a, HexCoord b) { return hex_distance(a, b) == 1; }

std::optional<Direction> direction_between(HexCoord a, HexCoord b) {
  for (Direction d : kAllDirections) {
    if (step(a, d) == b) return d;
  }
  return std::nullopt;
}

}  // namespace hexwar
