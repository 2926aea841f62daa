#pragma once

// Command-line front end. Everything but argv handling lives here so tests
// can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lossgame/model.hpp"

namespace lossgame::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kParse = 2,
  kValidation = 3,
  kSize = 4,
  kSimulation = 5,
};

struct RunConfig {
  std::optional<SystemSpec> spec;
  StabilityRule rule = StabilityRule::RbIa;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> grid;
  std::string output_path;  // empty: standard output
  bool oracle = false;
  int max_steps = 10'000;
};

/// "start:stop:points" with an optional "log" or "lin" suffix on the point
/// count (or as a fourth field); log spacing by default. Throws ParseError.
std::vector<double> parse_grid(const std::string& text);

/// Reads {"agents": [...], "lambda": x, "mu": y}. Throws ParseError on bad
/// JSON or missing keys, DomainError on invalid values.
SystemSpec read_config(const std::string& path);

/// The config file text for `spec` (agents in the caller's order).
std::string config_json(const SystemSpec& spec);

/// Fixed 12-significant-digit rendering, independent of the global locale.
std::string format_number(double v);

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lossgame::cli
