#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "arena/match.hpp"

namespace arena {

struct ServeOptions {
  MatchConfig config;  // exactly one side must be human
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  bool training = false;   // static dummy opponent, health and timer frozen
  int training_ticks = 6000;
  int tick_ms = 100;
  std::filesystem::path replay_dir = "replays";
};

struct SessionResult {
  bool completed = false;  // the match ran to its end
  std::optional<std::string> error;  // protocol violation reported to the client
  std::string replay_id;
  std::filesystem::path replay_path;
  Replay replay;
};

/// Server-to-client frames.
nlohmann::json state_message(const GameState& s);
nlohmann::json round_end_message(const RoundResult& r);
nlohmann::json match_end_message(const MatchResult& r, const std::string& replay_id);
nlohmann::json error_message(std::string_view code, std::string_view message);

/// Hosts one live match over WebSocket text frames carrying JSON.
/// Client frames: {"type":"join","name"} first, then {"type":"input","tick","action"}.
class MatchServer {
 public:
  /// Binds immediately. Throws PortInUse or ConfigError.
  explicit MatchServer(ServeOptions opts);
  ~MatchServer();
  MatchServer(const MatchServer&) = delete;
  MatchServer& operator=(const MatchServer&) = delete;

  std::uint16_t port() const;

  /// Accepts one client and plays the match; blocks until the session ends.
  SessionResult serve_one();
  /// Ends the session in progress or a pending accept. Thread-safe.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arena
