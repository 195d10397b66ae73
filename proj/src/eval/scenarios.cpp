#include "hexwar/eval/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <regex>
#include <stdexcept>

#include "hexwar/scenario_io.hpp"

namespace hexwar::eval {

namespace {

constexpr int kSize = 5;

std::vector<HexCoord> row_cells(int row, int width) {
  std::vector<HexCoord> out;
  for (int c = 0; c < width; ++c) out.push_back({row, c});
  return out;
}

ScenarioSpec base(const std::string& name, int height, int width) {
  ScenarioSpec s;
  s.name = name;
  s.height = height;
  s.width = width;
  s.terrain_types = default_terrain_table();
  s.unit_types = default_unit_table();
  s.terrain_map.assign(static_cast<std::size_t>(height) * width, kPlains);
  s.stack_limit = 2;
  s.reinforcement_window = 2;
  return s;
}

void set(ScenarioSpec& s, int r, int c, TerrainId t) { s.terrain_map[cell_index({r, c}, s.width)] = t; }

ReinforcementEntry entry(int type, int turn, std::vector<HexCoord> at) { return {type, turn, std::move(at)}; }

}  // namespace

std::vector<Terrain> default_terrain_table() {
  return {
      {"plains", '.', 1.0, 1.0, 1, false},
      {"mountain", 'M', 0.5, 2.0, 2, false},
      {"forest", 'F', 1.5, 1.0, 2, false},
      {"swamp", 'S', 1.0, 0.5, 3, false},
  };
}

std::vector<UnitType> default_unit_table() { return {{"infantry", 2, 2, 3}, {"armour", 4, 4, 6}}; }

void TerrainDistribution::validate() const {
  for (double p : {swamp, mountain, plains, forest}) {
    if (!(p >= 0.0)) throw std::invalid_argument("terrain distribution: probabilities must be nonnegative");
  }
  if (std::abs(swamp + mountain + plains + forest - 1.0) > 1e-9)
    throw std::invalid_argument("terrain distribution: probabilities must sum to 1");
}

RandomMap generate_random_map(int height, int width, const TerrainDistribution& dist, std::uint64_t seed) {
  dist.validate();
  if (height < 1 || width < 1 || height * width < 2)
    throw std::invalid_argument("generate_random_map: board needs at least two cells");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomMap m;
  m.terrain.resize(static_cast<std::size_t>(height) * width);
  const double c_swamp = dist.swamp;
  const double c_mountain = c_swamp + dist.mountain;
  const double c_plains = c_mountain + dist.plains;
  for (auto& t : m.terrain) {
    const double x = u(rng);
    if (x < c_swamp) {
      t = kSwamp;
    } else if (x < c_mountain) {
      t = kMountain;
    } else if (x < c_plains || dist.forest == 0.0) {
      t = kPlains;
    } else {
      t = kForest;
    }
  }
  const int cells = height * width;
  std::uniform_int_distribution<int> pick(0, cells - 1);
  const int a = pick(rng);
  int b = a;
  while (b == a) b = pick(rng);
  m.vp = {cell_coord(a, width), cell_coord(b, width)};
  return m;
}

ScenarioSpec asymmetric_scenario() {
  // Player two defends a single VP behind a mountain ridge with one infantry.
  ScenarioSpec s = base("asymmetric", kSize, kSize);
  for (int c = 1; c <= 3; ++c) set(s, 1, c, kMountain);
  set(s, 3, 0, kForest);
  set(s, 3, 4, kForest);
  s.vp_tiles = {{{0, 2}, Player::P2}, {{4, 2}, Player::P1}};
  s.initial_reinforcements[0] = {entry(kInfantry, 0, row_cells(4, kSize)), entry(kInfantry, 0, row_cells(4, kSize))};
  s.initial_reinforcements[1] = {entry(kInfantry, 0, {{0, 1}, {0, 2}, {0, 3}})};
  s.total_turns = 5;
  return s;
}

ScenarioSpec symmetric_scenario() {
  // Mirror image under row -> 4 - row, which preserves odd-r adjacency on a
  // five-row board.
  ScenarioSpec s = base("symmetric", kSize, kSize);
  set(s, 1, 1, kForest);
  set(s, 1, 3, kForest);
  set(s, 3, 1, kForest);
  set(s, 3, 3, kForest);
  set(s, 2, 0, kMountain);
  set(s, 2, 4, kMountain);
  set(s, 2, 2, kSwamp);
  s.vp_tiles = {{{4, 2}, Player::P1}, {{0, 2}, Player::P2}};
  s.initial_reinforcements[0] = {entry(kInfantry, 0, row_cells(4, kSize)), entry(kInfantry, 0, row_cells(4, kSize))};
  s.initial_reinforcements[1] = {entry(kInfantry, 0, row_cells(0, kSize)), entry(kInfantry, 0, row_cells(0, kSize))};
  s.total_turns = 6;
  return s;
}

ScenarioSpec curriculum_scenario() {
  ScenarioSpec s = symmetric_scenario();
  s.name = "curriculum";
  s.total_turns = 7;
  for (int turn : {3, 5}) {
    s.schedule[0].push_back(entry(kInfantry, turn, row_cells(4, kSize)));
    s.schedule[1].push_back(entry(kInfantry, turn, row_cells(0, kSize)));
  }
  return s;
}

ScenarioSpec randomized_scenario(std::uint64_t seed) {
  ScenarioSpec s = base("randomized", kSize, kSize);
  const RandomMap m = generate_random_map(kSize, kSize, TerrainDistribution{}, seed);
  s.terrain_map = m.terrain;
  s.vp_tiles = {{m.vp[0], Player::P1}, {m.vp[1], Player::P2}};
  s.initial_reinforcements[0] = {entry(kInfantry, 0, row_cells(4, kSize)), entry(kInfantry, 0, row_cells(4, kSize))};
  s.initial_reinforcements[1] = {entry(kInfantry, 0, row_cells(0, kSize)), entry(kInfantry, 0, row_cells(0, kSize))};
  s.schedule[0] = {entry(kArmour, 2, row_cells(4, kSize))};
  s.schedule[1] = {entry(kArmour, 2, row_cells(0, kSize))};
  s.total_turns = 6;
  return s;
}

int plains_single_unit_turns(int height, int width) {
  // Infantry covers three plains hexes per turn; the farthest pair of cells
  // is at most (height - 1) + (width - 1) steps apart.
  const int span = (height - 1) + (width - 1);
  return std::max(2, (span + 2) / 3 + 1);
}

ScenarioSpec plains_single_unit_scenario(int height, int width, std::uint64_t seed) {
  ScenarioSpec s = base("plains" + std::to_string(height) + "x" + std::to_string(width), height, width);
  const RandomMap m = generate_random_map(height, width, TerrainDistribution::all_plains(), seed);
  s.vp_tiles = {{m.vp[1], Player::P2}};
  s.initial_reinforcements[0] = {entry(kInfantry, 0, {m.vp[0]})};
  s.total_turns = plains_single_unit_turns(height, width);
  return s;
}

std::map<std::string, ScenarioSpec> builtin_scenarios() {
  return {{"asymmetric", asymmetric_scenario()},
          {"symmetric", symmetric_scenario()},
          {"curriculum", curriculum_scenario()},
          {"randomized", randomized_scenario(0)}};
}

ScenarioSource ScenarioSource::of(ScenarioSpec s) {
  ScenarioSource src;
  src.name = s.name;
  src.fixed = std::make_shared<const ScenarioSpec>(std::move(s));
  return src;
}

ScenarioSource ScenarioSource::randomized() {
  ScenarioSource src;
  src.name = "randomized";
  src.generator = [](std::uint64_t seed) { return std::make_shared<const ScenarioSpec>(randomized_scenario(seed)); };
  return src;
}

ScenarioSource ScenarioSource::plains_single_unit(int height, int width) {
  ScenarioSource src;
  src.name = "plains" + std::to_string(height) + "x" + std::to_string(width);
  src.generator = [height, width](std::uint64_t seed) {
    return std::make_shared<const ScenarioSpec>(plains_single_unit_scenario(height, width, seed));
  };
  return src;
}

ScenarioSource resolve_scenario(const std::string& name) {
  if (name == "randomized") return ScenarioSource::randomized();
  static const std::regex plains_re("plains(\\d+)x(\\d+)");
  std::smatch m;
  if (std::regex_match(name, m, plains_re))
    return ScenarioSource::plains_single_unit(std::stoi(m[1].str()), std::stoi(m[2].str()));
  auto builtins = builtin_scenarios();
  if (auto it = builtins.find(name); it != builtins.end()) return ScenarioSource::of(it->second);
  if (std::filesystem::exists(name)) return ScenarioSource::of(load_scenario_file(name));
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected asymmetric, symmetric, curriculum, randomized, plainsHxW or a file)");
}

}  // namespace hexwar::eval
