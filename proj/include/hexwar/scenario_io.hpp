#pragma once

// Plain-text scenario files. See docs/scenario_format.md for the schema.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hexwar/rules.hpp"

namespace hexwar {

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

ScenarioSpec parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioSpec& s);

ScenarioSpec load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const ScenarioSpec& s, const std::filesystem::path& path);

/// Shortest decimal text that reads back to exactly the same double.
std::string format_real(double v);

}  // namespace hexwar
