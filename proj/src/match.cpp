#include "arena/match.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "arena/errors.hpp"
#include "arena/io.hpp"

namespace arena {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void MatchConfig::validate() const {
  rules.validate();
  if (max_ticks < 0) throw ConfigError("max_ticks must be >= 0");
  if (rules.training && max_ticks == 0) throw ConfigError("training matches need max_ticks");
}

json MatchConfig::to_json() const {
  json out{{"seed", seed},
           {"rules", rules_to_json(rules)},
           {"characters",
            {{"left", character_to_json(rules.characters[0])},
             {"right", character_to_json(rules.characters[1])}}},
           {"agents", {{"left", agents[0].to_json()}, {"right", agents[1].to_json()}}}};
  if (max_ticks) out["max_ticks"] = max_ticks;
  return out;
}

MatchConfig MatchConfig::from_json(const json& raw, const fs::path& base) {
  const json j = resolve_file_refs(raw, base);
  if (!j.is_object()) throw ConfigError("match config must be an object");
  try {
    std::array<CharacterSpec, 2> chars{default_character(), default_character()};
    if (j.contains("character")) chars[0] = chars[1] = character_from_json(j.at("character"));
    if (j.contains("characters")) {
      const auto& cj = j.at("characters");
      chars[0] = character_from_json(cj.at("left"));
      chars[1] = character_from_json(cj.at("right"));
    }
    MatchConfig c;
    c.rules = rules_from_json(j.value("rules", json::object()), chars[0], chars[1]);
    const auto& aj = j.at("agents");
    c.agents = {AgentSpec::from_json(aj.at("left")), AgentSpec::from_json(aj.at("right"))};
    c.seed = j.value("seed", std::uint64_t{0});
    c.max_ticks = j.value("max_ticks", 0);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed match config: ") + e.what());
  }
}

MatchConfig MatchConfig::load(const fs::path& path) {
  return from_json(read_json_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Serialization and digest
// ---------------------------------------------------------------------------

namespace {

json header_json(const Replay& r) {
  return json{{"type", "header"}, {"format", r.format}, {"engine", r.engine}, {"config", r.config_json}};
}

json tick_json(const Replay& r, std::size_t t) {
  const auto& spec = r.config.rules.characters;
  json out{{"type", "tick"},
           {"t", t},
           {"a", {action_id(r.actions[t][0], spec[0]), action_id(r.actions[t][1], spec[1])}}};
  if (!r.annotations.empty()) {
    json fsm = json::array();
    for (const auto& a : r.annotations[t]) fsm.push_back(a ? json(*a) : json(nullptr));
    out["fsm"] = fsm;
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view s) { EVP_DigestUpdate(ctx_, s.data(), s.size()); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx_, md, &n);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < n; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string winner_name(Winner w) { return std::string(to_string(w)); }

Winner parse_winner(const std::string& s) {
  if (s == "Left") return Winner::Left;
  if (s == "Right") return Winner::Right;
  if (s == "Draw") return Winner::Draw;
  throw FormatError("unknown winner '" + s + "'");
}

}  // namespace

json Replay::result_json() const {
  json rounds_j = json::array();
  for (const RoundResult& rr : rounds)
    rounds_j.push_back({{"winner", winner_name(rr.winner)}, {"cause", std::string(to_string(rr.cause))}});
  return json{{"winner", winner_name(result.winner)},
              {"damage_tiebreak", result.damage_tiebreak},
              {"rounds", rounds_j},
              {"round_wins", round_wins},
              {"match_damage", match_damage},
              {"ticks", actions.size()}};
}

std::string replay_digest(const Replay& r) {
  Sha256 h;
  h.update(header_json(r).dump());
  h.update("\n");
  for (std::size_t t = 0; t < r.actions.size(); ++t) {
    h.update(tick_json(r, t).dump());
    h.update("\n");
  }
  h.update(r.result_json().dump());
  return h.hex();
}

std::vector<std::string> Replay::lines() const {
  std::vector<std::string> out;
  out.reserve(actions.size() + 2);
  out.push_back(header_json(*this).dump());
  for (std::size_t t = 0; t < actions.size(); ++t) out.push_back(tick_json(*this, t).dump());
  out.push_back(json{{"type", "footer"}, {"result", result_json()}, {"digest", digest}}.dump());
  return out;
}

std::string replay_to_string(const Replay& r) {
  std::string out;
  for (const auto& l : r.lines()) {
    out += l;
    out += '\n';
  }
  return out;
}

void save_replay(const Replay& r, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write replay '" + path.string() + "'");
  out << replay_to_string(r);
}

Replay parse_replay(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<json> docs;
  try {
    while (std::getline(in, line))
      if (!line.empty()) docs.push_back(json::parse(line));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("replay line is not JSON: ") + e.what());
  }
  if (docs.size() < 2) throw FormatError("replay needs a header and a footer");
  Replay r;
  try {
    const json& head = docs.front();
    if (head.at("type") != "header") throw FormatError("first replay line must be the header");
    r.format = head.at("format").get<int>();
    r.engine = head.at("engine").get<std::string>();
    r.config_json = head.at("config");
    if (r.format != kReplayFormat)
      throw VersionMismatch("replay format " + std::to_string(r.format) + " is not supported");
    r.config = MatchConfig::from_json(r.config_json);
    const json& foot = docs.back();
    if (foot.at("type") != "footer") throw FormatError("last replay line must be the footer");
    const auto& spec = r.config.rules.characters;
    bool annotated = false;
    for (std::size_t i = 1; i + 1 < docs.size(); ++i) {
      const json& d = docs[i];
      if (d.at("type") != "tick" || d.at("t").get<std::size_t>() != i - 1)
        throw FormatError("tick lines must be numbered consecutively from 0");
      std::array<Action, 2> pair{};
      for (int s = 0; s < 2; ++s) {
        const auto id = d.at("a").at(static_cast<std::size_t>(s)).get<std::string>();
        auto a = parse_action(id, spec[static_cast<std::size_t>(s)]);
        // an unknown action is kept as an out-of-range move so verification fails
        pair[static_cast<std::size_t>(s)] = a ? *a : Action{ActionKind::Attack, 0xFF, Motion::None};
      }
      r.actions.push_back(pair);
      std::array<std::optional<std::string>, 2> ann{};
      if (d.contains("fsm")) {
        annotated = true;
        for (int s = 0; s < 2; ++s) {
          const auto& v = d.at("fsm").at(static_cast<std::size_t>(s));
          if (!v.is_null()) ann[static_cast<std::size_t>(s)] = v.get<std::string>();
        }
      }
      r.annotations.push_back(ann);
    }
    if (!annotated) r.annotations.clear();
    const json& res = foot.at("result");
    r.result = {parse_winner(res.at("winner").get<std::string>()), res.at("damage_tiebreak").get<bool>()};
    for (const auto& rr : res.at("rounds"))
      r.rounds.push_back({parse_winner(rr.at("winner").get<std::string>()),
                          rr.at("cause").get<std::string>() == "KO" ? EndCause::KO : EndCause::TimeOut});
    r.round_wins = res.at("round_wins").get<std::array<int, 2>>();
    r.match_damage = res.at("match_damage").get<std::array<int, 2>>();
    r.digest = foot.at("digest").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed replay: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("replay config: ") + e.what());
  }
  return r;
}

Replay load_replay(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open replay '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_replay(ss.str());
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

struct Recorder {
  Replay& r;
  std::shared_ptr<const Ruleset> rules;
};

void finish(Replay& r, const GameState& s, std::optional<MatchResult> result) {
  r.result = result.value_or(MatchResult{Winner::Draw, false});
  r.round_wins = s.round_wins;
  r.match_damage = s.match_damage;
  r.digest = replay_digest(r);
}

}  // namespace

std::array<std::unique_ptr<Agent>, 2> make_agents(const MatchConfig& cfg) {
  const auto& ch = cfg.rules.characters;
  return {make_agent(cfg.agents[0], ch[0], ch[1], derive_seed({cfg.seed, 0, 0xA9E7})),
          make_agent(cfg.agents[1], ch[1], ch[0], derive_seed({cfg.seed, 1, 0xA9E7}))};
}

Replay run_match(const MatchConfig& cfg) {
  cfg.validate();
  return run_match(cfg, make_agents(cfg));
}

Replay run_match(const MatchConfig& cfg, std::array<std::unique_ptr<Agent>, 2> agents,
                 const MatchHooks& hooks) {
  using Clock = std::chrono::steady_clock;
  cfg.validate();
  auto rules = std::make_shared<const Ruleset>(cfg.rules);
  Replay r;
  r.engine = rules->engine_fingerprint();
  r.config = cfg;
  r.config_json = cfg.to_json();

  GameState state = new_match(rules, cfg.seed);
  // readers decide second and see the first decision
  std::array<Side, 2> order{Side::Left, Side::Right};
  if (agents[0]->reads_input() && !agents[1]->reads_input()) order = {Side::Right, Side::Left};

  bool annotated = false;
  std::optional<MatchResult> result;
  while (!(result = match_result(state))) {
    if (hooks.should_stop && hooks.should_stop()) break;
    if (auto rr = round_result(state)) {
      r.rounds.push_back(*rr);
      if (hooks.on_round_end) hooks.on_round_end(state, *rr);
      state = next_round(state);
      for (auto& a : agents) a->on_round_start();
      continue;
    }
    if (cfg.max_ticks > 0 && r.actions.size() >= static_cast<std::size_t>(cfg.max_ticks)) break;
    std::array<Action, 2> chosen{Action::idle(), Action::idle()};
    std::optional<Action> first;
    for (Side side : order) {
      Agent& agent = *agents[static_cast<std::size_t>(idx(side))];
      DecisionContext ctx{state, side, observe(state, side), legal_actions(state, side), std::nullopt};
      if (agent.reads_input()) ctx.opponent_action = first;
      const auto t0 = Clock::now();
      Action a = agent.decide(ctx);
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      if (ctx.obs.can_act) {
        auto& st = r.stats[static_cast<std::size_t>(idx(side))];
        ++st.decisions;
        st.total_ms += ms;
        st.max_ms = std::max(st.max_ms, ms);
      }
      if (!is_legal(state, side, a)) a = Action::idle();
      chosen[static_cast<std::size_t>(idx(side))] = a;
      if (!first) first = a;
    }
    std::array<std::optional<std::string>, 2> ann{agents[0]->annotation(), agents[1]->annotation()};
    annotated |= ann[0].has_value() || ann[1].has_value();
    r.actions.push_back(chosen);
    r.annotations.push_back(std::move(ann));
    advance(state, chosen[0], chosen[1]);
    if (hooks.on_tick) hooks.on_tick(state, chosen);
  }
  if (!annotated) r.annotations.clear();
  finish(r, state, result);
  return r;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

/// Replays the actions; nullopt when an action is illegal or the recorded
/// ticks overrun the end of the match.
std::optional<Replay> resimulate(const Replay& src, std::vector<GameState>* states) {
  auto rules = std::make_shared<const Ruleset>(src.config.rules);
  GameState s = new_match(rules, src.config.seed);
  Replay out;
  out.format = src.format;
  out.engine = src.engine;
  out.config_json = src.config_json;
  out.config = src.config;
  out.actions = src.actions;
  out.annotations = src.annotations;
  std::size_t t = 0;
  std::optional<MatchResult> result;
  while (!(result = match_result(s))) {
    if (auto rr = round_result(s)) {
      out.rounds.push_back(*rr);
      s = next_round(s);
      continue;
    }
    if (t == src.actions.size()) break;  // the recording stopped early
    const auto& a = src.actions[t];
    if (!is_legal(s, Side::Left, a[0]) || !is_legal(s, Side::Right, a[1])) return std::nullopt;
    if (states) states->push_back(s);
    advance(s, a[0], a[1]);
    ++t;
  }
  if (t != src.actions.size()) return std::nullopt;
  if (states) states->push_back(s);
  finish(out, s, result);
  return out;
}

}  // namespace

bool verify_replay(const Replay& r, const Ruleset* expected) {
  if (r.format != kReplayFormat) throw VersionMismatch("unsupported replay format");
  const std::string engine = r.config.rules.engine_fingerprint();
  if (r.engine != engine)
    throw VersionMismatch("replay engine '" + r.engine + "' does not match '" + engine + "'");
  if (expected && (expected->engine_fingerprint() != engine ||
                   expected->round_length != r.config.rules.round_length ||
                   expected->rounds_to_win != r.config.rules.rounds_to_win ||
                   expected->training != r.config.rules.training))
    throw VersionMismatch("replay was recorded under different rules");
  const auto sim = resimulate(r, nullptr);
  if (!sim) return false;
  return sim->digest == r.digest && sim->result == r.result && sim->rounds == r.rounds &&
         sim->round_wins == r.round_wins && sim->match_damage == r.match_damage;
}

std::vector<GameState> replay_states(const Replay& r) {
  std::vector<GameState> states;
  if (!resimulate(r, &states)) throw FormatError("replay actions are not playable");
  return states;
}

}  // namespace arena
