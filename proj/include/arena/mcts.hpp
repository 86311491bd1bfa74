#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arena/engine.hpp"
#include "arena/rng.hpp"

namespace arena {

/// How the opponent is assumed to play inside the search.
struct OpponentModel {
  enum class Kind : std::uint8_t { UniformRandom, AlwaysBlock, InputReading, Scripted };
  Kind kind = Kind::UniformRandom;
  double difficulty = 1.0;     // InputReading
  std::vector<Action> script;  // Scripted, indexed by tick modulo length

  static OpponentModel uniform_random() { return {}; }
  static OpponentModel always_block() { return {Kind::AlwaysBlock, 1.0, {}}; }
  static OpponentModel input_reading(double d) { return {Kind::InputReading, d, {}}; }
  static OpponentModel scripted(std::vector<Action> s) { return {Kind::Scripted, 1.0, std::move(s)}; }
};

struct EvalWeights {
  double health = 0.8;
  double position = 0.1;
  double time = 0.1;
};

struct MctsConfig {
  int iteration_budget = 300;
  std::optional<double> time_budget_ms;
  double exploration_c = 1.414;
  int rollout_depth = 60;
  OpponentModel opponent;
  EvalWeights weights;

  /// Throws ConfigError.
  void validate() const;

  static MctsConfig from_json(const nlohmann::json& j, const CharacterSpec& opponent_spec);
  nlohmann::json to_json(const CharacterSpec& opponent_spec) const;
};

/// Unvisited children score +infinity; otherwise
/// wins/visits + c * sqrt(ln(parent_visits) / visits).
double ucb1(double child_wins, int child_visits, int parent_visits, double c);

struct MctsNode {
  std::optional<Action> action_from_parent;
  double wins = 0.0;
  int visits = 0;
  bool planner_to_move = true;
  bool terminal = false;
  int parent = -1;
  std::vector<int> children;
  ActionSet untried;
  GameState state;  // held by planner-to-move nodes
};

/// Search tree with nodes alternating between planner decisions and
/// opponent-model draws. Node 0 is the root.
struct MctsTree {
  std::vector<MctsNode> nodes;

  const MctsNode& root() const { return nodes.front(); }
};

/// Adds one visit to every node on `path` (leaf first). Planner-to-move nodes
/// accumulate `payoff`, opponent-to-move nodes accumulate 1 - payoff.
void backpropagate(MctsTree& tree, std::span<const int> path, double payoff);

/// Heuristic value in [0,1] of `state` for `side`: health lead, centre
/// control and a health lead weighted by elapsed round time.
double evaluate(const GameState& state, Side side, const EvalWeights& w);

/// Action the opponent model plays against the planner's `planner_action`.
Action opponent_action(const OpponentModel& model, const GameState& state, Side opponent_side,
                       Action planner_action, Rng& rng);

/// Random playout from `state`: the planner (`side`) plays uniformly random
/// legal actions, the opponent follows the model. Returns 1/0/0.5 for a
/// round won/lost/drawn, else the evaluation after rollout_depth ticks.
double simulate(const GameState& state, Side side, const MctsConfig& cfg, Rng& rng);

struct RootChildStat {
  Action action;
  int visits = 0;
  double mean_payoff = 0.0;  // from the planner's perspective
};

struct PlanResult {
  Action action;
  int iterations = 0;
  std::size_t root_branching = 0;
  std::vector<RootChildStat> children;
  double elapsed_ms = 0.0;
};

/// Budgeted search for the fighter on `side`. When `root_actions` is
/// non-empty the root decision is restricted to legal ∩ root_actions.
/// Returns the most visited root child; ties go to the smallest action id.
/// Throws TerminalState or NoLegalActions.
PlanResult plan(const GameState& state, Side side, const MctsConfig& cfg, Rng& rng,
                std::span<const Action> root_actions = {}, MctsTree* tree_out = nullptr);

}  // namespace arena
