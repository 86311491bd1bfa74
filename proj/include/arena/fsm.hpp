#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arena/condition.hpp"
#include "arena/engine.hpp"
#include "arena/rng.hpp"

namespace arena {

using StateId = std::string;

inline constexpr std::size_t kMaxTacticLength = 20;

/// Tactics and pools are authored for a fighter facing right, so MoveRight
/// means forward. Mirrors movement for a fighter facing left.
constexpr Action oriented(Action a, Facing f) {
  if (f == Facing::Right) return a;
  if (a.kind == ActionKind::MoveLeft) return Action::move_right();
  if (a.kind == ActionKind::MoveRight) return Action::move_left();
  return a;
}

/// A stored input sequence executed while its FSM state is active.
struct Tactic {
  std::string name;
  std::vector<Action> actions;
  bool abort_on_blocked_hit = false;
  bool abort_on_took_hit = false;
  double weight = 1.0;  // used by weighted selection only
};

struct FsmState {
  StateId id;
  std::vector<Tactic> tactics;
  /// Action set handed to the search in the FSM+MCTS hybrid. When empty, the
  /// distinct first actions of the tactics are used.
  std::vector<Action> pool;

  std::vector<Action> search_pool() const;
};

struct Transition {
  StateId from;
  StateId to;
  Condition when;
  int priority = 0;
};

enum class TacticSelection : std::uint8_t { RoundRobin, Weighted };

/// Finite-state machine with prioritized conditional transitions.
///
/// Transitions leaving the same state are evaluated highest priority first;
/// equal priorities keep declaration order. At most one fires per step.
class FsmDef {
 public:
  FsmDef() = default;
  /// Throws UnknownState for dangling references and ConfigError for other
  /// invariant violations.
  FsmDef(std::vector<FsmState> states, std::vector<Transition> transitions, StateId initial,
         TacticSelection selection = TacticSelection::RoundRobin);

  const std::vector<FsmState>& states() const { return states_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const StateId& initial() const { return states_[static_cast<std::size_t>(initial_)].id; }
  int initial_index() const { return initial_; }
  TacticSelection selection() const { return selection_; }

  int index_of(std::string_view id) const;  // -1 when absent
  int require(std::string_view id) const;   // throws UnknownState
  const FsmState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }

  /// Transition indices leaving `state`, in evaluation order.
  std::span<const int> outgoing(int state) const;

  static FsmDef from_json(const nlohmann::json& j, const CharacterSpec& spec);
  nlohmann::json to_json(const CharacterSpec& spec) const;

 private:
  std::vector<FsmState> states_;
  std::vector<Transition> transitions_;
  int initial_ = 0;
  TacticSelection selection_ = TacticSelection::RoundRobin;
  std::vector<int> target_;               // per transition
  std::vector<std::vector<int>> order_;   // per state

  friend struct FsmStepIndex;
};

struct FsmStep {
  StateId next;
  std::optional<Transition> fired;
};

/// Index-level result used on hot paths.
struct FsmStepIndex {
  int next = 0;
  int fired = -1;  // transition index, -1 when none fired

  static FsmStepIndex run(const FsmDef& def, int current, const Features& f);
};

FsmStep fsm_step(const FsmDef& def, std::string_view current, const Features& f);
inline FsmStep fsm_step(const FsmDef& def, std::string_view current, const Observation& obs) {
  return fsm_step(def, current, Features::from(obs));
}

// ---------------------------------------------------------------------------
// Hierarchical machines
// ---------------------------------------------------------------------------

struct Superstate {
  StateId id;
  FsmDef machine;
};

/// Two-level machine: outer transitions connect superstates and apply no
/// matter which child is active; entering a superstate starts its machine at
/// its initial state.
class HfsmDef {
 public:
  HfsmDef() = default;
  HfsmDef(std::vector<Superstate> superstates, std::vector<Transition> outer, StateId initial);

  const std::vector<Superstate>& superstates() const { return supers_; }
  const std::vector<Transition>& outer() const { return outer_.transitions(); }
  const StateId& initial() const { return outer_.initial(); }
  int index_of(std::string_view id) const { return outer_.index_of(id); }
  const Superstate& super(int i) const { return supers_[static_cast<std::size_t>(i)]; }

  /// The outer layer as a plain FSM over superstate ids.
  const FsmDef& outer_machine() const { return outer_; }

  static HfsmDef from_json(const nlohmann::json& j, const CharacterSpec& spec);

 private:
  std::vector<Superstate> supers_;
  FsmDef outer_;
};

struct HfsmPosition {
  StateId super;
  StateId child;
  friend bool operator==(const HfsmPosition&, const HfsmPosition&) = default;
};

HfsmPosition hfsm_initial(const HfsmDef& def);
HfsmPosition hfsm_step(const HfsmDef& def, const HfsmPosition& current, const Features& f);

// ---------------------------------------------------------------------------
// Input reading
// ---------------------------------------------------------------------------

/// The class that beats `c` under the triad; Move for Move/Idle (approach).
IntentClass counter_intent(IntentClass c);

struct InputReadContext {
  const CharacterSpec* spec = nullptr;
  Facing facing = Facing::Right;  // direction of the opponent
  int distance = -1;              // negative when unknown
};

/// With probability `difficulty` plays the counter of `opponent_intent`,
/// otherwise a uniformly random class among Attack/Block/Grab/Move, realized
/// as a concrete Action for the character in `ctx`. Against Move/Idle the
/// counter approaches, or strikes with the fastest strike once the opponent
/// is within its range.
Action input_read_policy(IntentClass opponent_intent, double difficulty, Rng& rng,
                         const InputReadContext& ctx);

/// One decision of the input-reading fighter on `side`, who sees the
/// opponent's action for this tick. A read against a blocker keeps guard
/// rather than grabbing. Idle when the fighter cannot act or the chosen
/// action is illegal.
Action input_reading_act(const GameState& state, Side side, Action opponent_action, double difficulty,
                         Rng& rng);

// ---------------------------------------------------------------------------
// Tactic execution
// ---------------------------------------------------------------------------

struct TacticCursor {
  int tactic = -1;
  std::size_t index = 0;
};

struct FsmAgentState {
  int state = -1;  // -1 before the first tick
  TacticCursor cursor;
  std::vector<std::size_t> round_robin;  // per FSM state
};

/// One decision of an FSM-driven fighter. `legal` may be empty, in which case
/// every tactic action is assumed legal whenever obs.can_act.
Action fsm_agent_act(const FsmDef& def, FsmAgentState& st, const Observation& obs,
                     std::span<const Action> legal = {}, Rng* rng = nullptr);

struct HfsmAgentState {
  int super = -1;
  FsmAgentState inner;
};

Action hfsm_agent_act(const HfsmDef& def, HfsmAgentState& st, const Observation& obs,
                      std::span<const Action> legal = {}, Rng* rng = nullptr);

// Shared by the FSM agents and the hybrids.
namespace detail {
void select_tactic(const FsmState& state, int state_index, FsmAgentState& st,
                   TacticSelection mode, Rng* rng);
bool should_abort(const Tactic& t, const Observation& obs);
Action next_tactic_action(const FsmState& state, FsmAgentState& st, const Observation& obs,
                          std::span<const Action> legal);
}  // namespace detail

Tactic tactic_from_json(const nlohmann::json& j, const CharacterSpec& spec);
nlohmann::json tactic_to_json(const Tactic& t, const CharacterSpec& spec);

}  // namespace arena
