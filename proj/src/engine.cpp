#include "arena/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <unordered_set>

#include <boost/container/small_vector.hpp>

#include "arena/errors.hpp"

namespace arena {

std::string_view to_string(Side s) { return s == Side::Left ? "Left" : "Right"; }

std::string_view to_string(IntentClass c) {
  switch (c) {
    case IntentClass::Attack: return "Attack";
    case IntentClass::Block: return "Block";
    case IntentClass::Grab: return "Grab";
    case IntentClass::Move: return "Move";
    case IntentClass::Idle: return "Idle";
  }
  return "?";
}

std::string_view to_string(InteractionOutcome o) {
  switch (o) {
    case InteractionOutcome::LeftWins: return "LeftWins";
    case InteractionOutcome::RightWins: return "RightWins";
    case InteractionOutcome::Trade: return "Trade";
    case InteractionOutcome::Neutral: return "Neutral";
  }
  return "?";
}

namespace {

// Does `a` beat `b` outright?
bool beats(IntentClass a, IntentClass b) {
  using I = IntentClass;
  switch (a) {
    case I::Attack: return b == I::Grab || b == I::Move || b == I::Idle;
    case I::Grab: return b == I::Block || b == I::Move || b == I::Idle;
    case I::Block: return b == I::Attack;
    case I::Move:
    case I::Idle: return false;
  }
  return false;
}

}  // namespace

InteractionOutcome resolve_interaction(IntentClass left, IntentClass right) noexcept {
  if (beats(left, right)) return InteractionOutcome::LeftWins;
  if (beats(right, left)) return InteractionOutcome::RightWins;
  if (left == IntentClass::Attack && right == IntentClass::Attack) return InteractionOutcome::Trade;
  return InteractionOutcome::Neutral;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::pair<InputToken, std::string_view>, 9> kTokenNames = {{
    {InputToken::Down, "Down"},
    {InputToken::DownFwd, "DownFwd"},
    {InputToken::DownBack, "DownBack"},
    {InputToken::Fwd, "Fwd"},
    {InputToken::Back, "Back"},
    {InputToken::Atk, "Atk"},
    {InputToken::FwdAtk, "Fwd+Atk"},
    {InputToken::Block, "Block"},
    {InputToken::Grab, "Grab"},
}};
}  // namespace

std::string_view to_string(InputToken t) {
  for (const auto& [tok, name] : kTokenNames)
    if (tok == t) return name;
  return "?";
}

std::optional<InputToken> parse_input_token(std::string_view s) {
  for (const auto& [tok, name] : kTokenNames)
    if (name == s) return tok;
  return std::nullopt;
}

bool match_input_pattern(std::span<const InputEvent> history,
                         std::span<const InputToken> pattern, int max_gap) {
  if (pattern.empty()) throw EmptyPattern("input pattern must be non-empty");
  // latest[j]: largest tick at which a valid match of pattern[0..j] ends.
  // A later end can only shrink the gap to the next token, so keeping the
  // latest end per prefix is exact.
  constexpr std::int64_t kNone = INT64_MIN;
  boost::container::small_vector<std::int64_t, 8> latest(pattern.size(), kNone);
  for (const InputEvent& ev : history) {
    for (std::size_t j = pattern.size(); j-- > 0;) {
      if (ev.token != pattern[j]) continue;
      if (j == 0) {
        latest[0] = ev.tick;
      } else if (latest[j - 1] != kNone && ev.tick > latest[j - 1] &&
                 ev.tick - latest[j - 1] <= max_gap) {
        latest[j] = ev.tick;
      }
    }
  }
  return latest.back() != kNone;
}

IntentClass intent_class(Action a) {
  switch (a.kind) {
    case ActionKind::Attack:
    case ActionKind::Special: return IntentClass::Attack;
    case ActionKind::Block: return IntentClass::Block;
    case ActionKind::Grab: return IntentClass::Grab;
    case ActionKind::MoveLeft:
    case ActionKind::MoveRight: return IntentClass::Move;
    case ActionKind::Idle: return IntentClass::Idle;
  }
  return IntentClass::Idle;
}

// ---------------------------------------------------------------------------
// Character data
// ---------------------------------------------------------------------------

void CharacterSpec::validate() const {
  auto fail = [&](const std::string& why) {
    throw ConfigError("character '" + name + "': " + why);
  };
  if (max_health <= 0) fail("max_health must be > 0");
  if (walk_speed <= 0) fail("walk_speed must be > 0");
  if (moves.size() > 16) fail("at most 16 moves supported");
  std::unordered_set<std::string> ids;
  bool has_strike = false, has_grab = false;
  for (const MoveSpec& m : moves) {
    if (!ids.insert(m.id).second) fail("duplicate move id '" + m.id + "'");
    if (m.startup < 0 || m.active < 1 || m.recovery < 0 || m.damage < 0 || m.range <= 0 ||
        m.hitstun < 0 || m.blockstun < 0)
      fail("move '" + m.id + "' has out-of-range frame data");
    if (m.is_special() != !m.input_pattern.empty())
      fail("move '" + m.id + "': input_pattern must be present iff the move is special");
    if (m.projectile && m.projectile->speed <= 0)
      fail("move '" + m.id + "': projectile speed must be > 0");
    has_strike |= m.type == MoveType::Strike;
    has_grab |= m.type == MoveType::Grab;
  }
  if (!has_strike) fail("needs at least one non-special attack");
  if (!has_grab) fail("needs a grab");
}

int CharacterSpec::grab_index() const {
  for (std::size_t i = 0; i < moves.size(); ++i)
    if (moves[i].type == MoveType::Grab) return static_cast<int>(i);
  return -1;
}

std::optional<std::uint8_t> CharacterSpec::find_move(std::string_view id) const {
  for (std::size_t i = 0; i < moves.size(); ++i)
    if (moves[i].id == id) return static_cast<std::uint8_t>(i);
  return std::nullopt;
}

CharacterSpec default_character() {
  CharacterSpec c;
  c.name = "Ryu-like";
  c.max_health = 100;
  c.walk_speed = 2;
  c.moves.push_back({"Punch", MoveType::Strike, 3, 2, 4, 10, 10, 6, 3, {}, std::nullopt});
  c.moves.push_back({"Heavy", MoveType::Strike, 6, 2, 8, 18, 12, 9, 4, {}, std::nullopt});
  c.moves.push_back({"Grab", MoveType::Grab, 2, 1, 6, 12, 5, 10, 0, {}, std::nullopt});
  c.moves.push_back({"Fireball", MoveType::Special, 4, 1, 12, 0, 1, 8, 4,
                     {InputToken::Down, InputToken::DownFwd, InputToken::FwdAtk},
                     ProjectileSpec{4, 15}});
  return c;
}

std::string action_id(Action a, const CharacterSpec& spec) {
  auto move_name = [&]() -> std::string {
    return a.move < spec.moves.size() ? spec.moves[a.move].id : std::to_string(a.move);
  };
  switch (a.kind) {
    case ActionKind::MoveLeft: return "MoveLeft";
    case ActionKind::MoveRight: return "MoveRight";
    case ActionKind::Attack: return "Attack:" + move_name();
    case ActionKind::Special: return "Special:" + move_name();
    case ActionKind::Block: return "Block";
    case ActionKind::Grab: return "Grab";
    case ActionKind::Idle:
      switch (a.motion) {
        case Motion::None: return "Idle";
        case Motion::Down: return "Idle:Down";
        case Motion::DownFwd: return "Idle:DownFwd";
        case Motion::DownBack: return "Idle:DownBack";
        case Motion::FwdAtk: return "Idle:Fwd+Atk";
      }
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view id, const CharacterSpec& spec) {
  if (id == "Idle") return Action::idle();
  if (id == "Idle:Down") return Action::idle(Motion::Down);
  if (id == "Idle:DownFwd") return Action::idle(Motion::DownFwd);
  if (id == "Idle:DownBack") return Action::idle(Motion::DownBack);
  if (id == "Idle:Fwd+Atk") return Action::idle(Motion::FwdAtk);
  if (id == "MoveLeft") return Action::move_left();
  if (id == "MoveRight") return Action::move_right();
  if (id == "Block") return Action::block();
  if (id == "Grab") return Action::grab();
  auto with_move = [&](std::string_view prefix, MoveType want_special) -> std::optional<Action> {
    if (!id.starts_with(prefix)) return std::nullopt;
    auto m = spec.find_move(id.substr(prefix.size()));
    if (!m) return std::nullopt;
    const MoveSpec& ms = spec.moves[*m];
    if (want_special == MoveType::Special) {
      if (!ms.is_special()) return std::nullopt;
      return Action::special(*m);
    }
    if (ms.type != MoveType::Strike) return std::nullopt;
    return Action::attack(*m);
  };
  if (auto a = with_move("Attack:", MoveType::Strike)) return a;
  if (auto a = with_move("Special:", MoveType::Special)) return a;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rules and state
// ---------------------------------------------------------------------------

void Ruleset::validate() const {
  for (const auto& c : characters) c.validate();
  if (stage_length <= 0) throw ConfigError("stage_length must be > 0");
  if (round_length <= 0) throw ConfigError("round_length must be > 0");
  if (rounds_to_win < 1) throw ConfigError("rounds_to_win must be >= 1");
  if (max_rounds < 2 * rounds_to_win - 1) throw ConfigError("max_rounds too small");
  if (start_left < 0 || start_right > stage_length || start_left > start_right)
    throw ConfigError("start positions out of bounds");
  if (input_buffer_ticks < 1 || input_buffer_ticks > static_cast<int>(kInputHistoryCapacity))
    throw ConfigError("input_buffer_ticks out of range");
}

std::string Ruleset::engine_fingerprint() const {
  std::ostringstream os;
  os << kEngineVersion << ";stage=" << stage_length << ";wall=" << wall_epsilon
     << ";tps=" << ticks_per_second << ";buffer=" << input_buffer_ticks << ";gap=" << max_gap
     << ";maxrounds=" << max_rounds << ";start=" << start_left << "," << start_right;
  return os.str();
}

std::string_view to_string(Facing f) { return f == Facing::Left ? "Left" : "Right"; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Neutral: return "Neutral";
    case Phase::Startup: return "Startup";
    case Phase::Active: return "Active";
    case Phase::Recovery: return "Recovery";
    case Phase::Hitstun: return "Hitstun";
    case Phase::Blockstun: return "Blockstun";
    case Phase::Blocking: return "Blocking";
  }
  return "?";
}

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::Left: return "Left";
    case Winner::Right: return "Right";
    case Winner::Draw: return "Draw";
  }
  return "?";
}

std::string_view to_string(EndCause c) { return c == EndCause::KO ? "KO" : "TimeOut"; }

bool operator==(const GameState& a, const GameState& b) {
  const bool same_rules =
      a.rules == b.rules ||
      (a.rules && b.rules && a.rules->engine_fingerprint() == b.rules->engine_fingerprint() &&
       a.rules->round_length == b.rules->round_length && a.rules->training == b.rules->training);
  return same_rules && a.tick == b.tick && a.timer == b.timer && a.fighters == b.fighters &&
         a.projectiles == b.projectiles && a.round_wins == b.round_wins &&
         a.rounds_played == b.rounds_played && a.match_damage == b.match_damage &&
         a.rng_seed == b.rng_seed;
}

namespace {

void reset_fighters(GameState& s) {
  const Ruleset& r = *s.rules;
  for (int i = 0; i < 2; ++i) {
    FighterState f;
    f.position = i == 0 ? r.start_left : r.start_right;
    f.health = r.characters[i].max_health;
    f.facing = i == 0 ? Facing::Right : Facing::Left;
    s.fighters[i] = f;
  }
  s.projectiles.clear();
  s.timer = r.round_length;
}

}  // namespace

GameState new_match(std::shared_ptr<const Ruleset> rules, std::uint64_t seed) {
  if (!rules) throw ConfigError("ruleset required");
  rules->validate();
  GameState s;
  s.rules = std::move(rules);
  s.rng_seed = seed;
  reset_fighters(s);
  return s;
}

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

namespace {

bool attacking(const FighterState& f, const CharacterSpec& spec) {
  if (f.phase != Phase::Startup && f.phase != Phase::Active) return false;
  if (f.current_move < 0) return false;
  return spec.moves[static_cast<std::size_t>(f.current_move)].is_attack();
}

}  // namespace

Observation observe(const GameState& state, Side side) {
  const FighterState& me = state.fighter(side);
  const FighterState& opp = state.fighter(other(side));
  const Ruleset& r = *state.rules;
  Observation o;
  o.distance = std::abs(me.position - opp.position);
  o.opponent_attacking = attacking(opp, state.character(other(side)));
  o.projectile_on_screen = !state.projectiles.empty();
  o.damage_dealt = me.damage_dealt;
  o.facing = me.facing;
  o.against_wall = me.position <= r.wall_epsilon || me.position >= r.stage_length - r.wall_epsilon;
  o.own_health = me.health;
  o.opponent_health = opp.health;
  o.timer = state.timer;
  o.opponent_in_hitstun = opp.phase == Phase::Hitstun;
  o.can_act = me.can_act();
  o.in_hitstun = me.phase == Phase::Hitstun;
  o.opponent_blocking = opp.phase == Phase::Blocking;
  o.last_hit_landed = me.events.hit_landed;
  o.last_hit_blocked = me.events.hit_blocked;
  o.took_hit = me.events.took_hit;
  return o;
}

// ---------------------------------------------------------------------------
// Legality
// ---------------------------------------------------------------------------

namespace {

bool special_ready(const GameState& s, Side side, const MoveSpec& m) {
  const FighterState& f = s.fighter(side);
  return match_input_pattern(std::span<const InputEvent>(f.input_history.data(), f.input_history.size()),
                             m.input_pattern, s.rules->max_gap);
}

}  // namespace

ActionSet legal_actions(const GameState& state, Side side) {
  ActionSet out;
  out.push_back(Action::idle());
  const FighterState& f = state.fighter(side);
  if (!f.can_act()) return out;
  const CharacterSpec& spec = state.character(side);
  out.push_back(Action::move_left());
  out.push_back(Action::move_right());
  out.push_back(Action::block());
  if (spec.grab_index() >= 0) out.push_back(Action::grab());
  for (std::size_t i = 0; i < spec.moves.size(); ++i)
    if (spec.moves[i].type == MoveType::Strike) out.push_back(Action::attack(static_cast<std::uint8_t>(i)));
  for (std::size_t i = 0; i < spec.moves.size(); ++i)
    if (spec.moves[i].is_special() && special_ready(state, side, spec.moves[i]))
      out.push_back(Action::special(static_cast<std::uint8_t>(i)));
  return out;
}

bool is_legal(const GameState& state, Side side, Action a) {
  if (a.kind == ActionKind::Idle) return true;
  if (a.motion != Motion::None) return false;
  const FighterState& f = state.fighter(side);
  if (!f.can_act()) return false;
  const CharacterSpec& spec = state.character(side);
  switch (a.kind) {
    case ActionKind::MoveLeft:
    case ActionKind::MoveRight:
    case ActionKind::Block: return true;
    case ActionKind::Grab: return spec.grab_index() >= 0;
    case ActionKind::Attack:
      return a.move < spec.moves.size() && spec.moves[a.move].type == MoveType::Strike;
    case ActionKind::Special:
      return a.move < spec.moves.size() && spec.moves[a.move].is_special() &&
             special_ready(state, side, spec.moves[a.move]);
    case ActionKind::Idle: return true;
  }
  return false;
}

namespace {

IntentClass committed_intent(const FighterState& f, const CharacterSpec& spec) {
  switch (f.phase) {
    case Phase::Startup:
    case Phase::Active:
      if (f.current_move < 0) return IntentClass::Idle;
      return spec.moves[static_cast<std::size_t>(f.current_move)].type == MoveType::Grab
                 ? IntentClass::Grab
                 : IntentClass::Attack;
    case Phase::Blocking: return IntentClass::Block;
    case Phase::Neutral: return f.events.moved ? IntentClass::Move : IntentClass::Idle;
    default: return IntentClass::Idle;
  }
}

}  // namespace

IntentClass intent_of(const GameState& state, Side side, Action chosen) {
  const FighterState& f = state.fighter(side);
  if (f.can_act()) return intent_class(chosen);
  return committed_intent(f, state.character(side));
}

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

namespace {

void record_input(GameState& s, Side side, Action a) {
  FighterState& f = s.fighter(side);
  const bool fwd_is_right = f.facing == Facing::Right;
  std::optional<InputToken> tok;
  switch (a.kind) {
    case ActionKind::MoveLeft: tok = fwd_is_right ? InputToken::Back : InputToken::Fwd; break;
    case ActionKind::MoveRight: tok = fwd_is_right ? InputToken::Fwd : InputToken::Back; break;
    case ActionKind::Attack:
    case ActionKind::Special: tok = InputToken::Atk; break;
    case ActionKind::Block: tok = InputToken::Block; break;
    case ActionKind::Grab: tok = InputToken::Grab; break;
    case ActionKind::Idle:
      switch (a.motion) {
        case Motion::None: break;
        case Motion::Down: tok = InputToken::Down; break;
        case Motion::DownFwd: tok = InputToken::DownFwd; break;
        case Motion::DownBack: tok = InputToken::DownBack; break;
        case Motion::FwdAtk: tok = InputToken::FwdAtk; break;
      }
      break;
  }
  const int window = s.rules->input_buffer_ticks;
  auto& h = f.input_history;
  // drop entries that fell out of the buffer window
  const std::int32_t now = s.tick + 1;
  auto first_live = std::find_if(h.begin(), h.end(),
                                 [&](const InputEvent& e) { return now - e.tick < window; });
  h.erase(h.begin(), first_live);
  if (!tok) return;
  if (h.size() == h.capacity()) h.erase(h.begin());
  h.push_back({now, *tok});
}

void spawn_projectile(GameState& s, Side side, const MoveSpec& m) {
  if (!m.projectile || s.projectiles.size() == s.projectiles.capacity()) return;
  const FighterState& f = s.fighter(side);
  Projectile p;
  p.owner = side;
  p.position = f.position;
  p.speed = f.facing == Facing::Right ? m.projectile->speed : -m.projectile->speed;
  p.damage = m.projectile->damage;
  p.hitstun = m.hitstun;
  p.blockstun = m.blockstun;
  s.projectiles.push_back(p);
}

void enter_active(GameState& s, Side side) {
  FighterState& f = s.fighter(side);
  const MoveSpec& m = s.character(side).moves[static_cast<std::size_t>(f.current_move)];
  f.phase = Phase::Active;
  f.phase_timer = m.active;
  if (m.is_special()) {
    spawn_projectile(s, side, m);
    f.move_connected = true;  // a special's damage travels with its projectile
  }
}

void enter_recovery(GameState& s, Side side) {
  FighterState& f = s.fighter(side);
  const MoveSpec& m = s.character(side).moves[static_cast<std::size_t>(f.current_move)];
  if (m.recovery > 0) {
    f.phase = Phase::Recovery;
    f.phase_timer = m.recovery;
  } else {
    f.phase = Phase::Neutral;
    f.phase_timer = 0;
    f.current_move = -1;
  }
}

void advance_phase(GameState& s, Side side) {
  FighterState& f = s.fighter(side);
  if (f.phase == Phase::Neutral || f.phase == Phase::Blocking) return;
  if (--f.phase_timer > 0) return;
  switch (f.phase) {
    case Phase::Startup: enter_active(s, side); break;
    case Phase::Active: enter_recovery(s, side); break;
    case Phase::Recovery:
      f.phase = Phase::Neutral;
      f.current_move = -1;
      break;
    case Phase::Hitstun:
      f.phase = Phase::Neutral;
      f.combo_hits_taken = 0;
      break;
    case Phase::Blockstun: f.phase = Phase::Neutral; break;
    default: break;
  }
}

void start_move(GameState& s, Side side, int move_index) {
  FighterState& f = s.fighter(side);
  const MoveSpec& m = s.character(side).moves[static_cast<std::size_t>(move_index)];
  f.current_move = move_index;
  f.move_connected = false;
  if (m.startup > 0) {
    f.phase = Phase::Startup;
    f.phase_timer = m.startup;
  } else {
    enter_active(s, side);
  }
}

// Returns the horizontal displacement requested by the action.
int apply_action(GameState& s, Side side, Action a) {
  FighterState& f = s.fighter(side);
  if (!f.can_act()) return 0;
  if (a.kind == ActionKind::Block) {
    f.phase = Phase::Blocking;
    f.phase_timer = 0;
    return 0;
  }
  if (f.phase == Phase::Blocking) f.phase = Phase::Neutral;
  const CharacterSpec& spec = s.character(side);
  switch (a.kind) {
    case ActionKind::MoveLeft: return -spec.walk_speed;
    case ActionKind::MoveRight: return spec.walk_speed;
    case ActionKind::Attack: start_move(s, side, a.move); return 0;
    case ActionKind::Special:
      f.input_history.clear();  // the pattern is consumed
      start_move(s, side, a.move);
      return 0;
    case ActionKind::Grab: start_move(s, side, spec.grab_index()); return 0;
    default: return 0;
  }
}

void apply_movement(GameState& s, int dx_left, int dx_right) {
  const int len = s.rules->stage_length;
  FighterState& l = s.fighters[0];
  FighterState& r = s.fighters[1];
  const int old_l = l.position, old_r = r.position;
  int nl = std::clamp(old_l + dx_left, 0, len);
  int nr = std::clamp(old_r + dx_right, 0, len);
  const int before = (old_l > old_r) - (old_l < old_r);
  const int after = (nl > nr) - (nl < nr);
  if (before != 0 && after != 0 && before != after) {
    // fighters may meet but never pass through each other
    if (dx_left != 0 && dx_right != 0) {
      const int mid = (nl + nr) / 2;
      nl = nr = mid;
    } else if (dx_left != 0) {
      nl = nr;
    } else {
      nr = nl;
    }
  }
  l.position = nl;
  r.position = nr;
  l.events.moved = nl != old_l;
  r.events.moved = nr != old_r;
  if (l.position < r.position) {
    l.facing = Facing::Right;
    r.facing = Facing::Left;
  } else if (l.position > r.position) {
    l.facing = Facing::Left;
    r.facing = Facing::Right;
  }
}

struct PendingHit {
  Side victim;
  int damage;
  int hitstun;
  int blockstun;
  bool blocked;
};

void apply_hit(GameState& s, Side attacker, const PendingHit& h) {
  FighterState& atk = s.fighter(attacker);
  FighterState& vic = s.fighter(h.victim);
  if (h.blocked) {
    atk.events.hit_blocked = true;
    vic.events.blocked_hit = true;
    vic.phase = h.blockstun > 0 ? Phase::Blockstun : Phase::Blocking;
    vic.phase_timer = h.blockstun;
    vic.current_move = -1;
    return;
  }
  const bool in_combo = vic.phase == Phase::Hitstun;
  vic.combo_hits_taken = in_combo ? vic.combo_hits_taken + 1 : 1;
  const int dealt = std::min(h.damage, vic.health);
  if (!s.rules->training) vic.health -= dealt;
  atk.damage_dealt += h.damage;
  s.match_damage[idx(attacker)] += h.damage;
  if (h.hitstun > 0) {
    vic.phase = Phase::Hitstun;
    vic.phase_timer = h.hitstun;
  } else {
    vic.phase = Phase::Neutral;
    vic.phase_timer = 0;
    vic.combo_hits_taken = 0;
  }
  vic.current_move = -1;
  vic.move_connected = false;
  atk.events.hit_landed = true;
  vic.events.took_hit = true;
}

}  // namespace

void advance(GameState& s, Action left, Action right) {
  if (round_result(s)) throw RoundOver("round already decided");
  if (!is_legal(s, Side::Left, left))
    throw IllegalAction("Left: illegal action " + action_id(left, s.character(Side::Left)));
  if (!is_legal(s, Side::Right, right))
    throw IllegalAction("Right: illegal action " + action_id(right, s.character(Side::Right)));

  for (auto& f : s.fighters) f.events = {};

  // inputs are read against the pre-step state
  const std::array<bool, 2> could_act{s.fighters[0].can_act(), s.fighters[1].can_act()};
  record_input(s, Side::Left, left);
  record_input(s, Side::Right, right);

  advance_phase(s, Side::Left);
  advance_phase(s, Side::Right);

  int dx[2] = {0, 0};
  if (could_act[0]) dx[0] = apply_action(s, Side::Left, left);
  if (could_act[1]) dx[1] = apply_action(s, Side::Right, right);
  apply_movement(s, dx[0], dx[1]);

  // Intents are fixed before any hit of this tick is applied.
  const std::array<IntentClass, 2> intent{
      committed_intent(s.fighters[0], s.character(Side::Left)),
      committed_intent(s.fighters[1], s.character(Side::Right))};
  std::array<std::optional<PendingHit>, 2> melee;
  boost::container::static_vector<std::pair<Side, PendingHit>, kMaxProjectiles> ranged;

  // projectiles
  const int len = s.rules->stage_length;
  for (std::size_t i = 0; i < s.projectiles.size();) {
    Projectile& p = s.projectiles[i];
    const Side target = other(p.owner);
    const int from = p.position, to = p.position + p.speed;
    const int tpos = s.fighter(target).position;
    if (tpos >= std::min(from, to) && tpos <= std::max(from, to)) {
      const auto out = resolve_interaction(IntentClass::Attack, intent[idx(target)]);
      ranged.push_back({p.owner, PendingHit{target, p.damage, p.hitstun, p.blockstun,
                                            out == InteractionOutcome::RightWins}});
      s.projectiles.erase(s.projectiles.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    if (to < 0 || to > len) {
      s.projectiles.erase(s.projectiles.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    p.position = to;
    ++i;
  }

  // melee
  const int distance = std::abs(s.fighters[0].position - s.fighters[1].position);
  for (Side side : {Side::Left, Side::Right}) {
    FighterState& f = s.fighter(side);
    if (f.phase != Phase::Active || f.move_connected || f.current_move < 0) continue;
    const MoveSpec& m = s.character(side).moves[static_cast<std::size_t>(f.current_move)];
    if (m.is_special() || distance > m.range) continue;
    const Side victim = other(side);
    const auto out = resolve_interaction(intent[idx(side)], intent[idx(victim)]);
    switch (out) {
      case InteractionOutcome::LeftWins:
      case InteractionOutcome::Trade:
        melee[idx(side)] = PendingHit{victim, m.damage, m.hitstun, m.blockstun, false};
        f.move_connected = true;
        break;
      case InteractionOutcome::RightWins:
        if (intent[idx(victim)] == IntentClass::Block) {
          melee[idx(side)] = PendingHit{victim, 0, 0, m.blockstun, true};
          f.move_connected = true;
        }
        // a grab stuffed by an attack simply fails to connect this tick
        break;
      case InteractionOutcome::Neutral:
        f.move_connected = true;  // grab tech: both grabs are spent
        break;
    }
  }
  for (Side side : {Side::Left, Side::Right})
    if (melee[idx(side)]) apply_hit(s, side, *melee[idx(side)]);
  for (const auto& [attacker, hit] : ranged) apply_hit(s, attacker, hit);

  ++s.tick;
  if (!s.rules->training && s.timer > 0) --s.timer;
}

GameState step(const GameState& state, Action left, Action right) {
  GameState next = state;
  advance(next, left, right);
  return next;
}

std::optional<RoundResult> round_result(const GameState& s) {
  if (s.rules->training) return std::nullopt;
  const int hl = s.fighters[0].health, hr = s.fighters[1].health;
  auto by_health = [&]() {
    if (hl > hr) return Winner::Left;
    if (hr > hl) return Winner::Right;
    return Winner::Draw;
  };
  if (hl <= 0 || hr <= 0) return RoundResult{by_health(), EndCause::KO};
  if (s.timer <= 0) return RoundResult{by_health(), EndCause::TimeOut};
  return std::nullopt;
}

GameState next_round(const GameState& state) {
  auto result = round_result(state);
  if (!result) throw Error("next_round: round is still in progress");
  GameState s = state;
  if (result->winner == Winner::Left) ++s.round_wins[0];
  if (result->winner == Winner::Right) ++s.round_wins[1];
  ++s.rounds_played;
  reset_fighters(s);
  return s;
}

std::optional<MatchResult> match_result(const GameState& s) {
  const int need = s.rules->rounds_to_win;
  if (s.round_wins[0] >= need) return MatchResult{Winner::Left, false};
  if (s.round_wins[1] >= need) return MatchResult{Winner::Right, false};
  if (s.rounds_played >= s.rules->max_rounds) {
    const int a = s.match_damage[0], b = s.match_damage[1];
    return MatchResult{a > b ? Winner::Left : (b > a ? Winner::Right : Winner::Draw), true};
  }
  return std::nullopt;
}

}  // namespace arena
