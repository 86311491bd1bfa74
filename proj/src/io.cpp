#include "arena/io.hpp"

#include <cstdlib>
#include <fstream>

#include "arena/errors.hpp"

namespace arena {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json resolve_file_refs(const json& j, const fs::path& base) {
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(resolve_file_refs(e, base));
    return out;
  }
  if (!j.is_object()) return j;
  if (j.size() == 1 && j.contains("file") && j.at("file").is_string()) {
    fs::path p = j.at("file").get<std::string>();
    if (p.is_relative()) p = base / p;
    return resolve_file_refs(read_json_file(p), p.parent_path());
  }
  json out = json::object();
  constexpr std::string_view kSuffix = "_file";
  for (const auto& [key, value] : j.items()) {
    if (key.size() > kSuffix.size() && key.ends_with(kSuffix) && value.is_string()) {
      fs::path p = value.get<std::string>();
      if (p.is_relative()) p = base / p;
      const std::string target = key.substr(0, key.size() - kSuffix.size());
      out[target] = resolve_file_refs(read_json_file(p), p.parent_path());
    } else {
      out[key] = resolve_file_refs(value, base);
    }
  }
  return out;
}

namespace {

MoveType move_type_from(const std::string& s) {
  if (s == "strike") return MoveType::Strike;
  if (s == "grab") return MoveType::Grab;
  if (s == "special") return MoveType::Special;
  throw ConfigError("unknown move type '" + s + "'");
}

std::string move_type_name(MoveType t) {
  switch (t) {
    case MoveType::Strike: return "strike";
    case MoveType::Grab: return "grab";
    case MoveType::Special: return "special";
  }
  return "?";
}

}  // namespace

CharacterSpec character_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "default") return default_character();
  CharacterSpec c;
  try {
    c.name = j.at("name").get<std::string>();
    c.max_health = j.value("max_health", c.max_health);
    c.walk_speed = j.value("walk_speed", c.walk_speed);
    for (const auto& mj : j.at("moves")) {
      MoveSpec m;
      m.id = mj.at("id").get<std::string>();
      m.type = move_type_from(mj.value("type", std::string("strike")));
      m.startup = mj.at("startup").get<int>();
      m.active = mj.at("active").get<int>();
      m.recovery = mj.at("recovery").get<int>();
      m.damage = mj.value("damage", 0);
      m.range = mj.value("range", 1);
      m.hitstun = mj.value("hitstun", 0);
      m.blockstun = mj.value("blockstun", 0);
      if (mj.contains("input_pattern"))
        for (const auto& t : mj.at("input_pattern")) {
          auto tok = parse_input_token(t.get<std::string>());
          if (!tok) throw ConfigError("move '" + m.id + "': unknown input token " + t.dump());
          m.input_pattern.push_back(*tok);
        }
      if (mj.contains("projectile")) {
        const auto& pj = mj.at("projectile");
        m.projectile = ProjectileSpec{pj.at("speed").get<int>(), pj.at("damage").get<int>()};
      }
      c.moves.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed character: ") + e.what());
  }
  c.validate();
  return c;
}

json character_to_json(const CharacterSpec& c) {
  json moves = json::array();
  for (const MoveSpec& m : c.moves) {
    json mj{{"id", m.id},          {"type", move_type_name(m.type)}, {"startup", m.startup},
            {"active", m.active},  {"recovery", m.recovery},         {"damage", m.damage},
            {"range", m.range},    {"hitstun", m.hitstun},           {"blockstun", m.blockstun}};
    if (!m.input_pattern.empty()) {
      json pat = json::array();
      for (InputToken t : m.input_pattern) pat.push_back(std::string(to_string(t)));
      mj["input_pattern"] = pat;
    }
    if (m.projectile) mj["projectile"] = {{"speed", m.projectile->speed}, {"damage", m.projectile->damage}};
    moves.push_back(std::move(mj));
  }
  return json{{"name", c.name}, {"max_health", c.max_health}, {"walk_speed", c.walk_speed}, {"moves", moves}};
}

Ruleset rules_from_json(const json& j, const CharacterSpec& left, const CharacterSpec& right) {
  Ruleset r;
  r.characters = {left, right};
  if (!j.is_null()) {
    if (!j.is_object()) throw ConfigError("rules must be an object");
    try {
      r.stage_length = j.value("stage_length", r.stage_length);
      r.wall_epsilon = j.value("wall_epsilon", r.wall_epsilon);
      r.round_length = j.value("round_length", r.round_length);
      r.ticks_per_second = j.value("ticks_per_second", r.ticks_per_second);
      r.input_buffer_ticks = j.value("input_buffer_ticks", r.input_buffer_ticks);
      r.max_gap = j.value("max_gap", r.max_gap);
      r.rounds_to_win = j.value("rounds_to_win", r.rounds_to_win);
      r.max_rounds = j.value("max_rounds", r.max_rounds);
      r.start_left = j.value("start_left", r.start_left);
      r.start_right = j.value("start_right", r.start_right);
      r.training = j.value("training", r.training);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed rules: ") + e.what());
    }
  }
  r.validate();
  return r;
}

json rules_to_json(const Ruleset& r) {
  return json{{"stage_length", r.stage_length},
              {"wall_epsilon", r.wall_epsilon},
              {"round_length", r.round_length},
              {"ticks_per_second", r.ticks_per_second},
              {"input_buffer_ticks", r.input_buffer_ticks},
              {"max_gap", r.max_gap},
              {"rounds_to_win", r.rounds_to_win},
              {"max_rounds", r.max_rounds},
              {"start_left", r.start_left},
              {"start_right", r.start_right},
              {"training", r.training}};
}

fs::path data_dir() {
  if (const char* env = std::getenv("ARENA_DATA_DIR")) return env;
#ifdef ARENA_DATA_DIR
  return ARENA_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace arena
