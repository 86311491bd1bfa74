#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "arena/errors.hpp"
#include "arena/io.hpp"
#include "arena/match.hpp"
#include "arena/mcts.hpp"
#include "arena/miner.hpp"
#include "arena/server.hpp"
#include "arena/tournament.hpp"

namespace py = pybind11;
using namespace arena;
using nlohmann::json;

namespace {

Side parse_side(const std::string& s) {
  if (s == "left" || s == "Left") return Side::Left;
  if (s == "right" || s == "Right") return Side::Right;
  throw ConfigError("unknown side '" + s + "'");
}

IntentClass parse_intent(const std::string& s) {
  for (IntentClass c : kAllIntents)
    if (to_string(c) == s) return c;
  throw ConfigError("unknown intent class '" + s + "'");
}

/// A match in progress under the default ruleset.
class Game {
 public:
  explicit Game(std::uint64_t seed, const std::string& rules_json) {
    const CharacterSpec c = default_character();
    auto rules = std::make_shared<Ruleset>(rules_from_json(json::parse(rules_json), c, c));
    state_ = new_match(std::move(rules), seed);
  }

  std::vector<std::string> legal(const std::string& side) const {
    const Side s = parse_side(side);
    std::vector<std::string> out;
    for (Action a : legal_actions(state_, s)) out.push_back(action_id(a, spec(s)));
    return out;
  }

  void advance_ids(const std::string& left, const std::string& right) {
    advance(state_, action(Side::Left, left), action(Side::Right, right));
  }

  std::optional<std::string> winner() const {
    const auto r = round_result(state_);
    if (!r) return std::nullopt;
    return std::string(to_string(r->winner));
  }

  std::string state_json() const { return state_message(state_).dump(); }

  std::string observation_json(const std::string& side) const {
    const Observation o = observe(state_, parse_side(side));
    return json{{"distance", o.distance},
                {"opponent_attacking", o.opponent_attacking},
                {"projectile_on_screen", o.projectile_on_screen},
                {"damage_dealt", o.damage_dealt},
                {"facing", std::string(to_string(o.facing))},
                {"against_wall", o.against_wall},
                {"own_health", o.own_health},
                {"opponent_health", o.opponent_health},
                {"timer", o.timer},
                {"opponent_in_hitstun", o.opponent_in_hitstun}}
        .dump();
  }

  std::string search(const std::string& side, int iterations, std::uint64_t seed) const {
    const Side s = parse_side(side);
    MctsConfig cfg;
    cfg.iteration_budget = iterations;
    cfg.validate();
    Rng rng(seed);
    return action_id(plan(state_, s, cfg, rng).action, spec(s));
  }

  int tick() const { return state_.tick; }

 private:
  const CharacterSpec& spec(Side s) const { return state_.rules->characters[static_cast<std::size_t>(idx(s))]; }

  Action action(Side s, const std::string& id) const {
    const auto a = parse_action(id, spec(s));
    if (!a) throw ConfigError("unknown action '" + id + "'");
    return *a;
  }

  GameState state_;
};

std::string run_match_text(const std::string& config, const std::string& base) {
  return replay_to_string(run_match(MatchConfig::from_json(json::parse(config), base)));
}

bool verify_text(const std::string& text) { return verify_replay(parse_replay(text)); }

std::string mine_texts(const std::vector<std::string>& replays, int max_len, int pool_size) {
  std::vector<Replay> parsed;
  for (const std::string& t : replays) parsed.push_back(parse_replay(t));
  const MinedTactics m = mine_tactics(parsed, default_classifier(), max_len, pool_size);
  return m.fsm.to_json(parsed.empty() ? default_character() : parsed.front().config.rules.characters[0]).dump();
}

std::string tournament_text(const std::string& roster, const std::string& base, int games, std::uint64_t seed,
                            unsigned workers) {
  return run_tournament(Roster::from_json(json::parse(roster), base), games, seed, workers).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_arena, m) {
  m.doc() = "Fighting-game agent arena";

  auto base = py::register_exception<Error>(m, "ArenaError");
  py::register_exception<IllegalAction>(m, "IllegalAction", base);
  py::register_exception<RoundOver>(m, "RoundOver", base);
  py::register_exception<TerminalState>(m, "TerminalState", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<AgentInitError>(m, "AgentInitError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<VersionMismatch>(m, "VersionMismatch", base);
  py::register_exception<EmptyLog>(m, "EmptyLog", base);

  m.attr("ENGINE_VERSION") = std::string(kEngineVersion);
  m.attr("REPLAY_FORMAT") = kReplayFormat;
  m.def("data_dir", [] { return data_dir().string(); });

  m.def(
      "resolve_interaction",
      [](const std::string& l, const std::string& r) {
        return std::string(to_string(resolve_interaction(parse_intent(l), parse_intent(r))));
      },
      py::arg("left"), py::arg("right"));

  py::class_<Game>(m, "Game")
      .def(py::init<std::uint64_t, const std::string&>(), py::arg("seed") = 0, py::arg("rules_json") = "{}")
      .def("legal_actions", &Game::legal, py::arg("side"))
      .def("advance", &Game::advance_ids, py::arg("left"), py::arg("right"))
      .def("round_winner", &Game::winner)
      .def("state_json", &Game::state_json)
      .def("observation_json", &Game::observation_json, py::arg("side"))
      .def("plan", &Game::search, py::arg("side"), py::arg("iterations") = 300, py::arg("seed") = 0,
           py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("tick", &Game::tick);

  m.def("run_match_json", &run_match_text, py::arg("config"), py::arg("base") = ".",
        py::call_guard<py::gil_scoped_release>());
  m.def("verify_replay_text", &verify_text, py::arg("text"), py::call_guard<py::gil_scoped_release>());
  m.def("mine_json", &mine_texts, py::arg("replays"), py::arg("max_len") = 3, py::arg("pool_size") = 5);
  m.def("run_tournament_json", &tournament_text, py::arg("roster"), py::arg("base") = ".", py::arg("games") = 10,
        py::arg("seed") = 0, py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
}
