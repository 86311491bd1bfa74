#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "arena/engine.hpp"

namespace arena {

/// Reads and parses a JSON document. Throws ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Replaces every `"<key>_file": "path"` member with `"<key>": <parsed file>`,
/// recursively, resolving relative paths against `base`. An object whose only
/// member is `"file"` is replaced by the whole referenced document. A file may
/// itself contain references, resolved against its own directory.
nlohmann::json resolve_file_refs(const nlohmann::json& j, const std::filesystem::path& base);

CharacterSpec character_from_json(const nlohmann::json& j);
nlohmann::json character_to_json(const CharacterSpec& c);

/// Rule overrides on top of the defaults: round_length, rounds_to_win,
/// max_rounds, stage_length, training, ...
Ruleset rules_from_json(const nlohmann::json& j, const CharacterSpec& left, const CharacterSpec& right);
/// Writes every rule field except the characters.
nlohmann::json rules_to_json(const Ruleset& r);

/// Directory holding the shipped fixtures.
std::filesystem::path data_dir();

}  // namespace arena
