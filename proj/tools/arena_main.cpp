// arena: run matches and tournaments, mine tactics, verify replays, serve a live match.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "arena/errors.hpp"
#include "arena/io.hpp"
#include "arena/match.hpp"
#include "arena/miner.hpp"
#include "arena/server.hpp"
#include "arena/tournament.hpp"

namespace fs = std::filesystem;
using namespace arena;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kVerifyFailed = 3;

MatchServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_match(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out) {
  MatchConfig cfg = MatchConfig::load(config);
  if (seed) cfg.seed = *seed;
  const Replay r = run_match(cfg);
  save_replay(r, out);
  std::cout << "winner " << to_string(r.result.winner) << "  rounds " << r.round_wins[0] << "-" << r.round_wins[1]
            << "  ticks " << r.actions.size() << "\n"
            << "digest " << r.digest << "\n";
  for (int s = 0; s < 2; ++s)
    std::cout << (s ? "right " : "left  ") << r.config.agents[s].display_name() << ": "
              << r.stats[s].mean_ms() << " ms/decision over " << r.stats[s].decisions << " decisions\n";
  return kOk;
}

int cmd_tournament(const fs::path& roster_path, int games, std::uint64_t seed, const fs::path& out,
                   unsigned workers) {
  const Roster roster = Roster::load(roster_path);
  const Standings st = run_tournament(roster, games, seed, workers);
  std::cout << st.to_table();
  fs::create_directories(out);
  write_json_file(out / "results.json", st.to_json());
  std::ofstream(out / "standings.txt") << st.to_table();
  return kOk;
}

int cmd_mine(const fs::path& logs, const fs::path& out, int max_len, int pool_size) {
  std::vector<fs::path> files;
  if (fs::is_directory(logs)) {
    for (const auto& e : fs::directory_iterator(logs))
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  } else {
    files.push_back(logs);
  }
  std::sort(files.begin(), files.end());
  std::vector<Replay> replays;
  for (const auto& f : files) replays.push_back(load_replay(f));
  const MinedTactics mined = mine_tactics(replays, default_classifier(), max_len, pool_size);
  write_json_file(out, mined.fsm.to_json(replays.front().config.rules.characters[0]));
  std::cout << "mined " << files.size() << " replays into " << mined.fsm.states().size() << " states -> " << out
            << "\n";
  return kOk;
}

int cmd_verify(const fs::path& path) {
  try {
    const Replay r = load_replay(path);
    if (!verify_replay(r)) {
      std::cout << "FAIL " << path.string() << "\n";
      return kVerifyFailed;
    }
    std::cout << "OK " << path.string() << " " << r.digest << "\n";
    return kOk;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
  } catch (const VersionMismatch& e) {
    std::cerr << "version mismatch: " << e.what() << "\n";
  }
  return kVerifyFailed;
}

int cmd_serve(const fs::path& config, std::uint16_t port, bool training, int tick_ms, const fs::path& replay_dir) {
  ServeOptions opts;
  opts.config = MatchConfig::load(config);
  opts.port = port;
  opts.training = training;
  opts.tick_ms = tick_ms;
  opts.replay_dir = replay_dir;
  MatchServer server(std::move(opts));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on ws://127.0.0.1:" << server.port() << std::endl;
  const SessionResult r = server.serve_one();
  g_server = nullptr;
  if (r.error) std::cout << "session closed: " << *r.error << "\n";
  if (!r.replay_id.empty()) std::cout << "replay " << r.replay_path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fighting-game agent arena"};
  app.require_subcommand(1);

  fs::path config, out, roster, logs, replay, replay_dir = "replays";
  std::optional<std::uint64_t> match_seed;
  std::uint64_t seed = 0;
  int games = 10, max_len = 3, pool_size = 5, tick_ms = 100;
  unsigned workers = 1;
  std::uint16_t port = 8080;
  bool training = false;

  auto* match = app.add_subcommand("match", "Play one match and write its replay");
  match->add_option("--config", config, "Match config (JSON)")->required()->check(CLI::ExistingFile);
  match->add_option("--seed", match_seed, "Override the config seed");
  match->add_option("--out", out, "Replay output path")->required();

  auto* tour = app.add_subcommand("tournament", "Round-robin over a roster");
  tour->add_option("--roster", roster, "Roster file (JSON)")->required()->check(CLI::ExistingFile);
  tour->add_option("--games", games, "Games per pair and side assignment")->check(CLI::PositiveNumber);
  tour->add_option("--seed", seed, "Master seed");
  tour->add_option("--out", out, "Output directory")->required();
  tour->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* mine = app.add_subcommand("mine", "Mine tactic pools from replays");
  mine->add_option("--logs", logs, "Replay directory or file")->required()->check(CLI::ExistingPath);
  mine->add_option("--out", out, "FSM definition output path")->required();
  mine->add_option("--max-len", max_len, "Longest n-gram")->check(CLI::PositiveNumber);
  mine->add_option("--pool-size", pool_size, "Tactics kept per state")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Re-simulate a replay and check its digest");
  verify->add_option("replay", replay, "Replay file")->required();

  auto* serve = app.add_subcommand("serve", "Host one live match for the play client");
  serve->add_option("--config", config, "Match config with one human side")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port");
  serve->add_flag("--training", training, "Static dummy; health and timer frozen");
  serve->add_option("--tick-ms", tick_ms, "Milliseconds per tick")->check(CLI::PositiveNumber);
  serve->add_option("--replay-dir", replay_dir, "Where finished sessions are stored");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*match) return cmd_match(config, match_seed, out);
    if (*tour) return cmd_tournament(roster, games, seed, out, workers);
    if (*mine) return cmd_mine(logs, out, max_len, pool_size);
    if (*verify) return cmd_verify(replay);
    if (*serve) return cmd_serve(config, port, training, tick_ms, replay_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const AgentInitError& e) {
    std::cerr << "agent error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kConfigError;
  } catch (const EmptyLog& e) {
    std::cerr << "nothing to mine: " << e.what() << "\n";
    return kConfigError;
  } catch (const PortInUse& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
