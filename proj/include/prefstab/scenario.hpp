#pragma once

#include <string>

#include "json.hpp"
#include "prefstab/dynamics.hpp"
#include "prefstab/stability.hpp"

namespace prefstab {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(const std::string& what, int line_, int col_)
      : std::runtime_error(what), line(line_), column(col_) {}
};

// Game file: {"players": n, "actions": [[labels]...],
//             "payoffs": {"a11,a21": ["7","7"], ...}}  (rationals as strings
// or integers). Serialization round-trips bit-exactly via canonical "p/q".
Json game_to_json(const Game& g);
Game game_from_json(const Json& j, const GameLimits& limits = GameLimits{});

// Scenario file: {"game": ..., "populations": [...], "regime": {...}}.
Json scenario_to_json(const Configuration& c);
Configuration scenario_from_json(const Json& j, const GameLimits& limits = GameLimits{});

Json load_json_file(const std::string& path);  // throws ParseError with line/column
void save_json_file(const std::string& path, const Json& j);

Json poly_to_json(const Poly& p, const std::vector<std::string>& names);
Json verdict_to_json(const Configuration& c, const StabilityVerdict& v, const StabilityOptions& options);
Json validation_to_json(const ValidationReport& report);

std::string verdict_kind_name(VerdictKind kind);

}  // namespace prefstab
