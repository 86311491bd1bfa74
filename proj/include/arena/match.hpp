#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/agents.hpp"
#include "arena/engine.hpp"

namespace arena {

inline constexpr int kReplayFormat = 1;

struct MatchConfig {
  Ruleset rules;  // carries both characters
  std::array<AgentSpec, 2> agents;
  std::uint64_t seed = 0;
  int max_ticks = 0;  // 0 = until the match is decided; required in training mode

  void validate() const;
  nlohmann::json to_json() const;
  /// Accepts "character" (both sides) or "characters": {"left","right"}, each
  /// either "default" or a character object; "*_file" references are
  /// resolved against `base`. Throws ConfigError.
  static MatchConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = ".");
  static MatchConfig load(const std::filesystem::path& path);
};

struct DecisionStats {
  std::size_t decisions = 0;  // ticks where the agent could act
  double total_ms = 0.0;
  double max_ms = 0.0;
  double mean_ms() const { return decisions ? total_ms / static_cast<double>(decisions) : 0.0; }
};

struct Replay {
  int format = kReplayFormat;
  std::string engine;
  nlohmann::json config_json;  // exactly as recorded in the header
  MatchConfig config;
  std::vector<std::array<Action, 2>> actions;
  std::vector<std::array<std::optional<std::string>, 2>> annotations;  // empty or one per tick
  std::vector<RoundResult> rounds;
  MatchResult result;
  std::array<int, 2> round_wins{0, 0};
  std::array<int, 2> match_damage{0, 0};
  std::string digest;
  std::array<DecisionStats, 2> stats;  // not serialized

  nlohmann::json result_json() const;
  /// Header, tick and footer lines.
  std::vector<std::string> lines() const;
};

/// SHA-256 (hex) over the header line, the tick lines and the result JSON.
std::string replay_digest(const Replay& r);

/// Per-tick hook used by the live server.
struct MatchHooks {
  std::function<void(const GameState&, const std::array<Action, 2>&)> on_tick;
  std::function<void(const GameState&, const RoundResult&)> on_round_end;
  std::function<bool()> should_stop;  // checked every tick
};

/// Agents of both sides, seeded from the match seed.
std::array<std::unique_ptr<Agent>, 2> make_agents(const MatchConfig& cfg);

/// Plays one match tick by tick. Readers decide after their opponent.
/// Throws ConfigError or AgentInitError.
Replay run_match(const MatchConfig& cfg);
Replay run_match(const MatchConfig& cfg, std::array<std::unique_ptr<Agent>, 2> agents,
                 const MatchHooks& hooks = {});

void save_replay(const Replay& r, const std::filesystem::path& path);
std::string replay_to_string(const Replay& r);
/// Throws FormatError.
Replay parse_replay(const std::string& text);
Replay load_replay(const std::filesystem::path& path);

/// Re-simulates the recorded actions and recomputes the digest. False on any
/// divergence, unknown or illegal action. Throws VersionMismatch when the
/// replay was recorded under another engine or format, or under rules other
/// than `expected` when given.
bool verify_replay(const Replay& r, const Ruleset* expected = nullptr);

/// Reconstructs the state before every tick of a replay and the final state.
/// Throws FormatError if the recorded actions are not playable.
std::vector<GameState> replay_states(const Replay& r);

}  // namespace arena
