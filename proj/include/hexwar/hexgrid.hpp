#pragma once

// Hex-grid geometry shared by the rules engine, the encoders and the hex
// convolutions.
//
// Offset convention: pointed-top hexes, odd rows shifted right ("odd-r").
// Row 0 is the top of the board. Every module derives adjacency from here.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace hexwar {

struct HexCoord {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(HexCoord, HexCoord) = default;
  friend constexpr auto operator<=>(HexCoord, HexCoord) = default;
};

/// Fixed direction ordering; pins the Move plane layout of the action tensor.
enum class Direction : std::uint8_t { E = 0, NE = 1, NW = 2, W = 3, SW = 4, SE = 5 };

inline constexpr int kNumDirections = 6;
inline constexpr std::array<Direction, kNumDirections> kAllDirections = {
    Direction::E, Direction::NE, Direction::NW, Direction::W, Direction::SW, Direction::SE};

constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % kNumDirections);
}

constexpr int index_of(Direction d) { return static_cast<int>(d); }

constexpr bool on_board(HexCoord c, int height, int width) {
  return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width;
}

/// Row-major linear index of an on-board cell.
constexpr int cell_index(HexCoord c, int width) { return c.row * width + c.col; }

constexpr HexCoord cell_coord(int index, int width) { return {index / width, index % width}; }

/// (row, col) offset of the neighbour in direction d, for a cell in a row of
/// the given parity.
constexpr std::array<int, 2> neighbor_offset(Direction d, bool odd_row) {
  switch (d) {
    case Direction::E: return {0, 1};
    case Direction::W: return {0, -1};
    case Direction::NE: return {-1, odd_row ? 1 : 0};
    case Direction::NW: return {-1, odd_row ? 0 : -1};
    case Direction::SW: return {1, odd_row ? 0 : -1};
    case Direction::SE: return {1, odd_row ? 1 : 0};
  }
  return {0, 0};
}

/// Adjacent coordinate ignoring board bounds.
constexpr HexCoord step(HexCoord c, Direction d) {
  const auto off = neighbor_offset(d, (c.row & 1) != 0);
  return {c.row + off[0], c.col + off[1]};
}

/// Adjacent on-board coordinate, or nullopt when the step leaves the board.
std::optional<HexCoord> neighbor(HexCoord c, Direction d, int height, int width);

/// Minimal number of single-hex steps between a and b, terrain ignored.
int hex_distance(HexCoord a, HexCoord b);

/// All on-board cells within distance `radius` of c, ordered by distance and
/// then by ring position (ring k starts k steps east of c and proceeds
/// counter-clockwise, so ring 1 follows direction index order).
std::vector<HexCoord> hex_neighborhood(HexCoord c, int radius, int height, int width);

bool are_adjacent(HexCoord a, HexCoord b);

/// Direction from a to an adjacent b, if they are adjacent.
std::optional<Direction> direction_between(HexCoord a, HexCoord b);

}  // namespace hexwar
