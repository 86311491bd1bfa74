#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/static_vector.hpp>

namespace arena {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

constexpr Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
constexpr int idx(Side s) { return static_cast<int>(s); }
std::string_view to_string(Side s);

// ---------------------------------------------------------------------------
// Combat categories and the attack/block/grab triad
// ---------------------------------------------------------------------------

enum class IntentClass : std::uint8_t { Attack, Block, Grab, Move, Idle };
inline constexpr std::array<IntentClass, 5> kAllIntents = {
    IntentClass::Attack, IntentClass::Block, IntentClass::Grab, IntentClass::Move,
    IntentClass::Idle};

enum class InteractionOutcome : std::uint8_t { LeftWins, RightWins, Trade, Neutral };

std::string_view to_string(IntentClass c);
std::string_view to_string(InteractionOutcome o);

/// Attack beats Grab, Grab beats Block, Block beats Attack. Attack and Grab
/// beat a fighter that is only moving or idle; Block and Move/Idle never win.
/// Identical Attacks trade; identical Grabs or Blocks are neutral.
InteractionOutcome resolve_interaction(IntentClass left, IntentClass right) noexcept;

// ---------------------------------------------------------------------------
// Inputs and actions
// ---------------------------------------------------------------------------

/// Directional/button tokens recorded in a fighter's input history. Fwd/Back
/// are relative to the fighter's facing.
enum class InputToken : std::uint8_t { Down, DownFwd, DownBack, Fwd, Back, Atk, FwdAtk, Block, Grab };

std::string_view to_string(InputToken t);
std::optional<InputToken> parse_input_token(std::string_view s);

struct InputEvent {
  std::int32_t tick = 0;
  InputToken token = InputToken::Down;
  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

inline constexpr std::size_t kInputHistoryCapacity = 32;
using InputHistory = boost::container::static_vector<InputEvent, kInputHistoryCapacity>;

/// True iff `pattern` occurs in order as a subsequence of `history` with at
/// most `max_gap` ticks between consecutive matched tokens.
/// Throws EmptyPattern if `pattern` is empty.
bool match_input_pattern(std::span<const InputEvent> history,
                         std::span<const InputToken> pattern, int max_gap);

enum class ActionKind : std::uint8_t { MoveLeft, MoveRight, Attack, Special, Block, Grab, Idle };

/// Extra directional input carried by an Idle action. It performs nothing but
/// is recorded in the input history, which is how special-move patterns are
/// entered.
enum class Motion : std::uint8_t { None, Down, DownFwd, DownBack, FwdAtk };

struct Action {
  ActionKind kind = ActionKind::Idle;
  std::uint8_t move = 0;  // index into CharacterSpec::moves for Attack/Special
  Motion motion = Motion::None;

  static constexpr Action idle(Motion m = Motion::None) { return {ActionKind::Idle, 0, m}; }
  static constexpr Action move_left() { return {ActionKind::MoveLeft, 0, Motion::None}; }
  static constexpr Action move_right() { return {ActionKind::MoveRight, 0, Motion::None}; }
  static constexpr Action block() { return {ActionKind::Block, 0, Motion::None}; }
  static constexpr Action grab() { return {ActionKind::Grab, 0, Motion::None}; }
  static constexpr Action attack(std::uint8_t m) { return {ActionKind::Attack, m, Motion::None}; }
  static constexpr Action special(std::uint8_t m) { return {ActionKind::Special, m, Motion::None}; }

  friend constexpr auto operator<=>(const Action&, const Action&) = default;
};

IntentClass intent_class(Action a);

inline constexpr std::size_t kMaxActions = 24;
using ActionSet = boost::container::static_vector<Action, kMaxActions>;

// ---------------------------------------------------------------------------
// Character data
// ---------------------------------------------------------------------------

enum class MoveType : std::uint8_t { Strike, Grab, Special };

struct ProjectileSpec {
  int speed = 0;
  int damage = 0;
};

struct MoveSpec {
  std::string id;
  MoveType type = MoveType::Strike;
  int startup = 0;
  int active = 1;
  int recovery = 0;
  int damage = 0;
  int range = 1;
  int hitstun = 0;
  int blockstun = 0;
  std::vector<InputToken> input_pattern;  // non-empty iff Special
  std::optional<ProjectileSpec> projectile;

  bool is_special() const { return type == MoveType::Special; }
  bool is_attack() const { return type != MoveType::Grab; }
};

struct CharacterSpec {
  std::string name;
  int max_health = 100;
  int walk_speed = 2;
  std::vector<MoveSpec> moves;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  int grab_index() const;  // -1 when absent
  std::optional<std::uint8_t> find_move(std::string_view id) const;
};

/// The built-in default fighter. The same data ships as
/// data/characters/default.json.
CharacterSpec default_character();

std::string action_id(Action a, const CharacterSpec& spec);
/// Inverse of action_id. Returns nullopt for unknown identifiers.
std::optional<Action> parse_action(std::string_view id, const CharacterSpec& spec);

// ---------------------------------------------------------------------------
// Rules and state
// ---------------------------------------------------------------------------

struct Ruleset {
  std::array<CharacterSpec, 2> characters;
  int stage_length = 100;
  int wall_epsilon = 2;
  int round_length = 990;  // ticks; 10 ticks per second
  int ticks_per_second = 10;
  int input_buffer_ticks = 20;
  int max_gap = 8;
  int rounds_to_win = 2;
  int max_rounds = 5;
  int start_left = 40;
  int start_right = 60;
  bool training = false;  // health and timer frozen

  void validate() const;
  /// Identifies the engine rules a replay was recorded with.
  std::string engine_fingerprint() const;
};

inline constexpr std::string_view kEngineVersion = "arena-engine/1";

enum class Facing : std::uint8_t { Left, Right };
enum class Phase : std::uint8_t { Neutral, Startup, Active, Recovery, Hitstun, Blockstun, Blocking };

std::string_view to_string(Facing f);
std::string_view to_string(Phase p);

/// Per-tick flags describing what happened to a fighter during the last step.
struct TickEvents {
  bool hit_landed = false;
  bool hit_blocked = false;  // own attack was blocked
  bool took_hit = false;
  bool blocked_hit = false;  // blocked an incoming attack
  bool moved = false;
  friend bool operator==(const TickEvents&, const TickEvents&) = default;
};

struct FighterState {
  int position = 0;
  int health = 0;
  Facing facing = Facing::Right;
  Phase phase = Phase::Neutral;
  int phase_timer = 0;
  int current_move = -1;  // index into moves, -1 when none
  bool move_connected = false;
  int combo_hits_taken = 0;
  int damage_dealt = 0;
  InputHistory input_history;
  TickEvents events;

  bool can_act() const { return phase == Phase::Neutral || phase == Phase::Blocking; }
  friend bool operator==(const FighterState&, const FighterState&) = default;
};

struct Projectile {
  Side owner = Side::Left;
  int position = 0;
  int speed = 0;  // signed
  int damage = 0;
  int hitstun = 0;
  int blockstun = 0;
  friend bool operator==(const Projectile&, const Projectile&) = default;
};

inline constexpr std::size_t kMaxProjectiles = 8;

struct GameState {
  std::shared_ptr<const Ruleset> rules;
  std::int32_t tick = 0;
  std::int32_t timer = 0;
  std::array<FighterState, 2> fighters;
  boost::container::static_vector<Projectile, kMaxProjectiles> projectiles;
  std::array<int, 2> round_wins{0, 0};
  int rounds_played = 0;
  std::array<int, 2> match_damage{0, 0};
  std::uint64_t rng_seed = 0;

  const FighterState& fighter(Side s) const { return fighters[idx(s)]; }
  FighterState& fighter(Side s) { return fighters[idx(s)]; }
  const CharacterSpec& character(Side s) const { return rules->characters[idx(s)]; }

  /// Equality over simulation content (rules compared by value identity).
  friend bool operator==(const GameState& a, const GameState& b);
};

GameState new_match(std::shared_ptr<const Ruleset> rules, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

struct Observation {
  int distance = 0;
  bool opponent_attacking = false;
  bool projectile_on_screen = false;
  int damage_dealt = 0;
  Facing facing = Facing::Right;
  bool against_wall = false;
  int own_health = 0;
  int opponent_health = 0;
  int timer = 0;
  bool opponent_in_hitstun = false;
  // engine plumbing used by tactics and leaves
  bool can_act = false;
  bool in_hitstun = false;
  bool opponent_blocking = false;
  bool last_hit_landed = false;
  bool last_hit_blocked = false;
  bool took_hit = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe(const GameState& state, Side side);

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

/// Actions the fighter on `side` may issue this tick. Stunned or committed
/// fighters get {Idle}. Idle variants carrying a Motion are always legal but
/// are not enumerated.
ActionSet legal_actions(const GameState& state, Side side);
bool is_legal(const GameState& state, Side side, Action a);

/// Combat intent a fighter presents this tick. For a fighter that can act
/// this is the class of `chosen`; otherwise it is the class of the committed
/// move (Startup/Active of an attack -> Attack, of a grab -> Grab), Idle for
/// stunned or recovering fighters.
IntentClass intent_of(const GameState& state, Side side, Action chosen);

/// Advances one tick in place. Throws RoundOver or IllegalAction.
void advance(GameState& state, Action left, Action right);

/// Pure successor function.
GameState step(const GameState& state, Action left, Action right);

enum class Winner : std::uint8_t { Left, Right, Draw };
enum class EndCause : std::uint8_t { KO, TimeOut };

std::string_view to_string(Winner w);
std::string_view to_string(EndCause c);

struct RoundResult {
  Winner winner = Winner::Draw;
  EndCause cause = EndCause::TimeOut;
  friend bool operator==(const RoundResult&, const RoundResult&) = default;
};

std::optional<RoundResult> round_result(const GameState& state);

/// Credits the finished round and resets fighters for the next one. Drawn
/// rounds are replayed. Requires round_result(state).
GameState next_round(const GameState& state);

struct MatchResult {
  Winner winner = Winner::Draw;
  bool damage_tiebreak = false;
  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Set once a side reaches rounds_to_win, or after max_rounds rounds by total
/// damage dealt.
std::optional<MatchResult> match_result(const GameState& state);

}  // namespace arena
