#include "hexwar/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace hexwar {

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct LineCtx {
  int line;
  [[noreturn]] void fail(const std::string& msg) const { throw ScenarioParseError(line, msg); }

  int to_int(const std::string& s) const {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail("expected integer, got '" + s + "'");
    return v;
  }
  double to_real(const std::string& s) const {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail("expected number, got '" + s + "'");
    return v;
  }
  bool to_bool(const std::string& s) const {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail("expected boolean, got '" + s + "'");
  }
};

// key=value arguments after the positional ones.
std::map<std::string, std::string> kv_args(const std::vector<std::string>& tok, std::size_t from, const LineCtx& ctx) {
  std::map<std::string, std::string> out;
  for (std::size_t i = from; i < tok.size(); ++i) {
    auto eq = tok[i].find('=');
    if (eq == std::string::npos || eq == 0) ctx.fail("expected key=value, got '" + tok[i] + "'");
    if (!out.emplace(tok[i].substr(0, eq), tok[i].substr(eq + 1)).second) ctx.fail("duplicate key " + tok[i]);
  }
  return out;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key, const LineCtx& ctx) {
  auto it = kv.find(key);
  if (it == kv.end()) ctx.fail("missing " + key + "=");
  return it->second;
}

std::vector<HexCoord> parse_locations(const std::string& s, const LineCtx& ctx) {
  std::vector<HexCoord> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto comma = item.find(',');
    if (comma == std::string::npos) ctx.fail("location must be row,col: '" + item + "'");
    out.push_back({ctx.to_int(item.substr(0, comma)), ctx.to_int(item.substr(comma + 1))});
  }
  if (out.empty()) ctx.fail("empty location list");
  return out;
}

int parse_player(const std::string& s, const LineCtx& ctx) {
  int p = ctx.to_int(s);
  if (p != 1 && p != 2) ctx.fail("player must be 1 or 2");
  return p - 1;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec s;
  s.terrain_map.clear();
  std::map<std::string, int> unit_index;
  std::vector<std::string> map_rows;
  bool in_map = false;
  bool have_size = false;
  int map_line = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const LineCtx ctx{lineno};
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    auto tok = split_ws(raw);
    if (tok.empty()) continue;
    if (in_map) {
      if (tok.size() == 1 && tok[0] == "end") {
        in_map = false;
        continue;
      }
      std::string row;
      for (const auto& t : tok) row += t;
      map_rows.push_back(row);
      continue;
    }
    const std::string& key = tok[0];
    if (key == "scenario") {
      if (tok.size() != 2) ctx.fail("scenario <name>");
      s.name = tok[1];
    } else if (key == "size") {
      if (tok.size() != 3) ctx.fail("size <height> <width>");
      s.height = ctx.to_int(tok[1]);
      s.width = ctx.to_int(tok[2]);
      have_size = true;
    } else if (key == "turns") {
      if (tok.size() != 2) ctx.fail("turns <n>");
      s.total_turns = ctx.to_int(tok[1]);
    } else if (key == "stack_limit") {
      if (tok.size() != 2) ctx.fail("stack_limit <S>");
      s.stack_limit = ctx.to_int(tok[1]);
    } else if (key == "reinforcement_window") {
      if (tok.size() != 2) ctx.fail("reinforcement_window <R>");
      s.reinforcement_window = ctx.to_int(tok[1]);
    } else if (key == "terrain") {
      if (tok.size() < 2) ctx.fail("terrain <name> symbol=.. attack=.. defence=.. cost=..");
      auto kv = kv_args(tok, 2, ctx);
      Terrain t;
      t.name = tok[1];
      const auto& sym = require(kv, "symbol", ctx);
      if (sym.size() != 1) ctx.fail("terrain symbol must be one character");
      t.symbol = sym[0];
      t.attack_modifier = ctx.to_real(require(kv, "attack", ctx));
      t.defence_modifier = ctx.to_real(require(kv, "defence", ctx));
      t.movement_cost = ctx.to_int(require(kv, "cost", ctx));
      if (auto it = kv.find("vp"); it != kv.end()) t.yields_vp = ctx.to_bool(it->second);
      for (const auto& other : s.terrain_types) {
        if (other.symbol == t.symbol) ctx.fail("duplicate terrain symbol");
      }
      s.terrain_types.push_back(t);
    } else if (key == "unit") {
      if (tok.size() < 2) ctx.fail("unit <name> attack=.. defence=.. movement=..");
      auto kv = kv_args(tok, 2, ctx);
      UnitType u;
      u.name = tok[1];
      u.attack = ctx.to_real(require(kv, "attack", ctx));
      u.defence = ctx.to_real(require(kv, "defence", ctx));
      u.movement = ctx.to_int(require(kv, "movement", ctx));
      if (!unit_index.emplace(u.name, static_cast<int>(s.unit_types.size())).second) ctx.fail("duplicate unit type");
      s.unit_types.push_back(u);
    } else if (key == "map") {
      if (!map_rows.empty()) ctx.fail("map block given twice");
      in_map = true;
      map_line = lineno;
    } else if (key == "vp") {
      if (tok.size() < 3) ctx.fail("vp <row> <col> [owner=0|1|2]");
      VictoryTile v;
      v.at = {ctx.to_int(tok[1]), ctx.to_int(tok[2])};
      auto kv = kv_args(tok, 3, ctx);
      if (auto it = kv.find("owner"); it != kv.end()) {
        int o = ctx.to_int(it->second);
        if (o < 0 || o > 2) ctx.fail("owner must be 0, 1 or 2");
        v.initial_owner = static_cast<Player>(o);
      }
      s.vp_tiles.push_back(v);
    } else if (key == "initial" || key == "reinforce") {
      if (tok.size() < 3) ctx.fail(key + " <player> <unit> at=r,c;r,c ...");
      const int seat = parse_player(tok[1], ctx);
      auto it = unit_index.find(tok[2]);
      if (it == unit_index.end()) ctx.fail("unknown unit type '" + tok[2] + "' (declare units first)");
      auto kv = kv_args(tok, 3, ctx);
      ReinforcementEntry e;
      e.unit_type = it->second;
      e.arrival_locations = parse_locations(require(kv, "at", ctx), ctx);
      if (key == "initial") {
        s.initial_reinforcements[seat].push_back(e);
      } else {
        e.arrival_turn = ctx.to_int(require(kv, "turn", ctx));
        s.schedule[seat].push_back(e);
      }
    } else {
      ctx.fail("unknown key '" + key + "'");
    }
  }
  if (in_map) throw ScenarioParseError(map_line, "map block not terminated by 'end'");
  if (!have_size) throw ScenarioParseError(lineno, "missing 'size'");
  if (static_cast<int>(map_rows.size()) != s.height)
    throw ScenarioParseError(map_line, "map has " + std::to_string(map_rows.size()) + " rows, expected " +
                                           std::to_string(s.height));
  for (const auto& row : map_rows) {
    if (static_cast<int>(row.size()) != s.width)
      throw ScenarioParseError(map_line, "map row '" + row + "' does not have width " + std::to_string(s.width));
    for (char ch : row) {
      int idx = -1;
      for (std::size_t t = 0; t < s.terrain_types.size(); ++t) {
        if (s.terrain_types[t].symbol == ch) idx = static_cast<int>(t);
      }
      if (idx < 0) throw ScenarioParseError(map_line, std::string("unknown terrain symbol '") + ch + "'");
      s.terrain_map.push_back(static_cast<std::uint8_t>(idx));
    }
  }
  // Tiles of VP-yielding terrain are victory tiles even without a vp line.
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      if (s.terrain_at({r, c}).yields_vp && s.vp_index({r, c}) < 0) s.vp_tiles.push_back({{r, c}, Player::None});
    }
  }
  try {
    s.validate();
  } catch (const RulesError& e) {
    throw ScenarioParseError(lineno, e.what());
  }
  return s;
}

std::string serialize_scenario(const ScenarioSpec& s) {
  std::ostringstream os;
  os << "scenario " << s.name << "\n";
  os << "size " << s.height << " " << s.width << "\n";
  os << "turns " << s.total_turns << "\n";
  os << "stack_limit " << s.stack_limit << "\n";
  os << "reinforcement_window " << s.reinforcement_window << "\n\n";
  for (const auto& t : s.terrain_types) {
    os << "terrain " << t.name << " symbol=" << t.symbol << " attack=" << format_real(t.attack_modifier)
       << " defence=" << format_real(t.defence_modifier) << " cost=" << t.movement_cost;
    if (t.yields_vp) os << " vp=true";
    os << "\n";
  }
  os << "\n";
  for (const auto& u : s.unit_types) {
    os << "unit " << u.name << " attack=" << format_real(u.attack) << " defence=" << format_real(u.defence)
       << " movement=" << u.movement << "\n";
  }
  os << "\nmap\n";
  for (int r = 0; r < s.height; ++r) {
    if (r & 1) os << " ";
    for (int c = 0; c < s.width; ++c) {
      if (c) os << " ";
      os << s.terrain_at({r, c}).symbol;
    }
    os << "\n";
  }
  os << "end\n\n";
  for (const auto& v : s.vp_tiles)
    os << "vp " << v.at.row << " " << v.at.col << " owner=" << static_cast<int>(v.initial_owner) << "\n";
  auto locations = [](const std::vector<HexCoord>& locs) {
    std::string out;
    for (std::size_t i = 0; i < locs.size(); ++i) {
      if (i) out += ";";
      out += std::to_string(locs[i].row) + "," + std::to_string(locs[i].col);
    }
    return out;
  };
  for (int seat = 0; seat < 2; ++seat) {
    for (const auto& e : s.initial_reinforcements[seat])
      os << "initial " << seat + 1 << " " << s.unit_types[e.unit_type].name << " at=" << locations(e.arrival_locations)
         << "\n";
  }
  for (int seat = 0; seat < 2; ++seat) {
    for (const auto& e : s.schedule[seat])
      os << "reinforce " << seat + 1 << " " << s.unit_types[e.unit_type].name << " turn=" << e.arrival_turn
         << " at=" << locations(e.arrival_locations) << "\n";
  }
  return os.str();
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void save_scenario_file(const ScenarioSpec& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << serialize_scenario(s);
}

}  // namespace hexwar
