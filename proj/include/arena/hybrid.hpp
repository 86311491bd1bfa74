#pragma once

#include <optional>
#include <vector>

#include "arena/bt.hpp"
#include "arena/fsm.hpp"
#include "arena/mcts.hpp"

namespace arena {

// ---------------------------------------------------------------------------
// FSM state chooses the pool, search chooses the move
// ---------------------------------------------------------------------------

struct FsmMctsAgentState {
  int state = -1;
  std::size_t empty_pool_events = 0;  // pool ∩ legal was empty; Idle was played
};

struct HybridDecision {
  Action action;
  std::size_t root_branching = 0;
  bool searched = false;
  bool empty_pool = false;
  int fsm_state = -1;
};

/// Checks that every pool is non-empty and expressible by `spec`.
/// Throws ConfigError.
void validate_pools(const FsmDef& def, const CharacterSpec& spec);

/// Advances the FSM on this tick's observation, then searches over the
/// active state's pool intersected with the legal actions. A single
/// remaining action is played without search; an empty intersection plays
/// Idle and is counted in `st.empty_pool_events`.
HybridDecision fsm_mcts_act(const FsmDef& def, FsmMctsAgentState& st, const GameState& state,
                            Side side, const MctsConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Search over FSM transitions
// ---------------------------------------------------------------------------

struct MacroAction {
  int target = 0;  // FSM state index
  int transition = -1;  // -1 for staying in the current state
};

/// Macro actions available from `current`: staying put, then one per
/// distinct target of a satisfied outgoing transition, in evaluation order.
std::vector<MacroAction> enabled_macros(const FsmDef& def, int current, const Features& f);

struct TransitionSearchConfig {
  MctsConfig mcts;
  int horizon = 10;  // ticks a macro action runs for
};

struct MacroStat {
  MacroAction macro;
  int visits = 0;
  double mean_payoff = 0.0;
};

struct TransitionPlan {
  MacroAction macro;
  std::size_t root_branching = 0;
  int iterations = 0;
  std::vector<MacroStat> children;
};

/// Open-loop search whose arms are macro actions. Executing a macro runs the
/// first tactic of its target state for `horizon` ticks while the opponent
/// follows the model. Throws TerminalState.
TransitionPlan plan_transitions(const FsmDef& def, int current, const GameState& state, Side side,
                                const TransitionSearchConfig& cfg, Rng& rng);

struct TransitionAgentState {
  int state = -1;
  std::int32_t commit_until = -1;  // tick at which the next search happens
  std::size_t cursor = 0;
  std::size_t last_branching = 0;
};

/// Plans when the previous macro has run its course, then plays the target
/// state's first tactic, one action per decision, until the horizon ends.
Action mcts_transition_act(const FsmDef& def, TransitionAgentState& st, const GameState& state,
                           Side side, const TransitionSearchConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Behavior tree leaf backed by search
// ---------------------------------------------------------------------------

struct LeafTick {
  Status status = Status::Failure;
  std::optional<Action> action;
  std::size_t root_branching = 0;
};

/// First entry plans over the leaf pool ∩ legal and emits the result
/// (Running). The leaf then fails if its owner is stunned or its attack is
/// blocked, and once the owner can act again it succeeds iff the objective
/// was met.
LeafTick bt_mcts_leaf_tick(const MctsLeafSpec& leaf, MctsLeafRuntime& rt, const GameState& state,
                           Side side, Rng& rng);

}  // namespace arena
