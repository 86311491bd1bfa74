#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/match.hpp"

namespace arena {

struct Roster {
  std::vector<AgentSpec> agents;  // display names must be distinct
  Ruleset rules;

  /// {"agents": [...], "rules": {...}, "character": ...}. Throws ConfigError.
  static Roster from_json(const nlohmann::json& j, const std::filesystem::path& base = ".");
  static Roster load(const std::filesystem::path& path);
};

struct PairRecord {
  std::string a, b;  // a < b in roster order
  int a_wins = 0, b_wins = 0, draws = 0;
};

struct Standing {
  std::string name;
  int wins = 0, losses = 0, draws = 0;
  int matches = 0;
  double mean_decision_ms = 0.0;
  double win_rate() const { return matches ? static_cast<double>(wins) / matches : 0.0; }
};

struct Standings {
  std::vector<Standing> table;  // win rate descending, ties by name
  std::vector<PairRecord> pairs;
  int matches = 0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Seed of one tournament match.
std::uint64_t match_seed(std::uint64_t master, std::size_t pair, int game, int side_swap);

/// Round-robin where every pair plays `games_per_pair` matches in each side
/// assignment, spread over `workers` threads. Results do not depend on the
/// worker count. Throws ConfigError.
Standings run_tournament(const Roster& roster, int games_per_pair, std::uint64_t master_seed,
                         unsigned workers = 1);

}  // namespace arena
