#include "arena/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "arena/errors.hpp"

namespace arena {

namespace {

bool expressible(Action a, const CharacterSpec& spec) {
  if (a.kind != ActionKind::Attack && a.kind != ActionKind::Special) return true;
  if (a.move >= spec.moves.size()) return false;
  const bool special = spec.moves[a.move].is_special();
  return a.kind == ActionKind::Special ? special : spec.moves[a.move].type == MoveType::Strike;
}

std::vector<Action> oriented_pool(std::span<const Action> pool, Facing f) {
  std::vector<Action> out;
  for (Action a : pool) out.push_back(oriented(a, f));
  return out;
}

ActionSet restrict(const ActionSet& legal, std::span<const Action> pool) {
  ActionSet out;
  for (Action a : legal)
    if (std::find(pool.begin(), pool.end(), a) != pool.end()) out.push_back(a);
  return out;
}

double terminal_payoff(const RoundResult& r, Side side) {
  if (r.winner == Winner::Draw) return 0.5;
  return (r.winner == Winner::Left) == (side == Side::Left) ? 1.0 : 0.0;
}

void advance_sides(GameState& s, Side side, Action mine, Action theirs) {
  if (side == Side::Left) advance(s, mine, theirs);
  else advance(s, theirs, mine);
}

}  // namespace

void validate_pools(const FsmDef& def, const CharacterSpec& spec) {
  for (const FsmState& s : def.states()) {
    const auto pool = s.search_pool();
    if (pool.empty()) throw ConfigError("FSM state '" + s.id + "' has an empty action pool");
    for (Action a : pool)
      if (!expressible(a, spec))
        throw ConfigError("pool of state '" + s.id + "' holds an action '" + spec.name + "' cannot perform");
  }
}

// ---------------------------------------------------------------------------

HybridDecision fsm_mcts_act(const FsmDef& def, FsmMctsAgentState& st, const GameState& state, Side side,
                            const MctsConfig& cfg, Rng& rng) {
  if (st.state < 0) st.state = def.initial_index();
  else st.state = FsmStepIndex::run(def, st.state, Features::from(observe(state, side))).next;

  HybridDecision d;
  d.fsm_state = st.state;
  d.action = Action::idle();
  if (!state.fighter(side).can_act()) {
    d.root_branching = 1;
    return d;
  }

  const auto pool = oriented_pool(def.state(st.state).search_pool(), state.fighter(side).facing);
  const ActionSet allowed = restrict(legal_actions(state, side), pool);
  d.root_branching = allowed.size();
  if (allowed.empty()) {
    ++st.empty_pool_events;
    d.empty_pool = true;
    return d;
  }
  if (allowed.size() == 1) {
    d.action = allowed.front();
    return d;
  }
  const PlanResult r = plan(state, side, cfg, rng, pool);
  d.action = r.action;
  d.searched = true;
  return d;
}

// ---------------------------------------------------------------------------

std::vector<MacroAction> enabled_macros(const FsmDef& def, int current, const Features& f) {
  std::vector<MacroAction> out{{current, -1}};
  for (int t : def.outgoing(current)) {
    const Transition& tr = def.transitions()[static_cast<std::size_t>(t)];
    if (!tr.when.eval(f)) continue;
    const int target = def.index_of(tr.to);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const MacroAction& m) { return m.target == target; });
    if (!seen) out.push_back({target, t});
  }
  return out;
}

namespace {

std::vector<Action> representative(const FsmState& s) {
  if (!s.tactics.empty()) return s.tactics.front().actions;
  if (!s.pool.empty()) return {s.pool.front()};
  throw ConfigError("FSM state '" + s.id + "' has neither tactics nor a pool");
}

struct MacroRunner {
  const FsmDef& def;
  Side side;
  const TransitionSearchConfig& cfg;
  Rng& rng;

  /// Runs `target`'s representative tactic for up to `ticks` ticks. Returns
  /// the number of ticks simulated (fewer when the round ends).
  int run(GameState& s, int target, int ticks) {
    const auto seq = representative(def.state(target));
    std::size_t cursor = 0;
    const Side opp = other(side);
    int n = 0;
    for (; n < ticks && !round_result(s); ++n) {
      Action mine = Action::idle();
      if (s.fighter(side).can_act()) {
        mine = oriented(seq[cursor++ % seq.size()], s.fighter(side).facing);
        if (!is_legal(s, side, mine)) mine = Action::idle();
      }
      const Action theirs = opponent_action(cfg.mcts.opponent, s, opp, mine, rng);
      advance_sides(s, side, mine, theirs);
    }
    return n;
  }
};

struct MacroNode {
  int fsm_state = 0;
  MacroAction macro;
  int visits = 0;
  double wins = 0.0;  // planner perspective
  std::vector<int> children;
};

}  // namespace

TransitionPlan plan_transitions(const FsmDef& def, int current, const GameState& state, Side side,
                                const TransitionSearchConfig& cfg, Rng& rng) {
  if (round_result(state)) throw TerminalState("plan_transitions: round already decided");
  if (cfg.horizon < 1) throw ConfigError("macro horizon must be >= 1");
  const auto root_macros = enabled_macros(def, current, Features::from(observe(state, side)));

  TransitionPlan out;
  out.root_branching = root_macros.size();
  if (root_macros.size() == 1) {
    out.macro = root_macros.front();
    out.children.push_back({out.macro, 0, 0.0});
    return out;
  }

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  MacroRunner runner{def, side, cfg, rng};
  std::vector<MacroNode> nodes;
  nodes.push_back(MacroNode{current, {current, -1}, 0, 0.0, {}});
  std::vector<int> path;

  auto child_for = [&](int node, const MacroAction& m) {
    for (int c : nodes[static_cast<std::size_t>(node)].children)
      if (nodes[static_cast<std::size_t>(c)].macro.target == m.target) return c;
    return -1;
  };

  int iterations = 0;
  while (true) {
    if (cfg.mcts.iteration_budget > 0 && iterations >= cfg.mcts.iteration_budget) break;
    if (cfg.mcts.time_budget_ms && iterations > 0 &&
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count() >= *cfg.mcts.time_budget_ms)
      break;
    GameState s = state;
    path.assign(1, 0);
    int node = 0;
    bool expanded = false;
    while (!round_result(s) && !expanded) {
      const MacroNode& n = nodes[static_cast<std::size_t>(node)];
      const auto macros =
          node == 0 ? root_macros : enabled_macros(def, n.fsm_state, Features::from(observe(s, side)));
      std::vector<MacroAction> untried;
      for (const MacroAction& m : macros)
        if (child_for(node, m) < 0) untried.push_back(m);
      int next = -1;
      if (!untried.empty()) {
        const MacroAction m = untried[rng.below(untried.size())];
        next = static_cast<int>(nodes.size());
        nodes.push_back(MacroNode{m.target, m, 0, 0.0, {}});
        nodes[static_cast<std::size_t>(node)].children.push_back(next);
        expanded = true;
      } else {
        double best = -std::numeric_limits<double>::infinity();
        const int parent_visits = nodes[static_cast<std::size_t>(node)].visits;
        for (const MacroAction& m : macros) {
          const int c = child_for(node, m);
          const MacroNode& ch = nodes[static_cast<std::size_t>(c)];
          const double score = ucb1(ch.wins, ch.visits, parent_visits, cfg.mcts.exploration_c);
          if (score > best) {
            best = score;
            next = c;
          }
        }
      }
      runner.run(s, nodes[static_cast<std::size_t>(next)].macro.target, cfg.horizon);
      node = next;
      path.push_back(node);
    }
    // rollout: random enabled macros until the depth is spent
    int fsm = nodes[static_cast<std::size_t>(node)].fsm_state;
    for (int spent = 0; spent < cfg.mcts.rollout_depth && !round_result(s);) {
      const auto macros = enabled_macros(def, fsm, Features::from(observe(s, side)));
      fsm = macros[rng.below(macros.size())].target;
      const int ran = runner.run(s, fsm, std::min(cfg.horizon, cfg.mcts.rollout_depth - spent));
      spent += std::max(ran, 1);
    }
    const auto rr = round_result(s);
    const double payoff = rr ? terminal_payoff(*rr, side) : evaluate(s, side, cfg.mcts.weights);
    for (int id : path) {
      nodes[static_cast<std::size_t>(id)].visits += 1;
      nodes[static_cast<std::size_t>(id)].wins += payoff;
    }
    ++iterations;
  }

  out.iterations = iterations;
  const MacroNode* best = nullptr;
  for (int c : nodes.front().children) {
    const MacroNode& ch = nodes[static_cast<std::size_t>(c)];
    out.children.push_back({ch.macro, ch.visits, ch.visits ? ch.wins / ch.visits : 0.0});
    if (!best || ch.visits > best->visits ||
        (ch.visits == best->visits && def.state(ch.macro.target).id < def.state(best->macro.target).id))
      best = &ch;
  }
  out.macro = best->macro;
  return out;
}

Action mcts_transition_act(const FsmDef& def, TransitionAgentState& st, const GameState& state, Side side,
                           const TransitionSearchConfig& cfg, Rng& rng) {
  if (st.state < 0) st.state = def.initial_index();
  if (!state.fighter(side).can_act()) return Action::idle();
  if (state.tick >= st.commit_until) {
    const TransitionPlan p = plan_transitions(def, st.state, state, side, cfg, rng);
    st.state = p.macro.target;
    st.commit_until = state.tick + cfg.horizon;
    st.cursor = 0;
    st.last_branching = p.root_branching;
  }
  const auto seq = representative(def.state(st.state));
  const Action a = oriented(seq[st.cursor++ % seq.size()], state.fighter(side).facing);
  return is_legal(state, side, a) ? a : Action::idle();
}

// ---------------------------------------------------------------------------

LeafTick bt_mcts_leaf_tick(const MctsLeafSpec& leaf, MctsLeafRuntime& rt, const GameState& state, Side side,
                           Rng& rng) {
  const FighterState& me = state.fighter(side);
  LeafTick out;
  if (!rt.started) {
    if (me.phase == Phase::Hitstun) return out;
    if (!me.can_act() || round_result(state)) {
      out.status = Status::Running;
      return out;
    }
    const auto pool = oriented_pool(leaf.pool, me.facing);
    const ActionSet allowed = restrict(legal_actions(state, side), pool);
    out.root_branching = allowed.size();
    if (allowed.empty()) return out;
    const Action a = allowed.size() == 1 ? allowed.front() : plan(state, side, leaf.config, rng, pool).action;
    rt = MctsLeafRuntime{true, a, me.health, false};
    out.status = Status::Running;
    out.action = a;
    return out;
  }
  if (me.events.hit_landed) rt.hit_landed = true;
  if (me.phase == Phase::Hitstun || me.events.hit_blocked) return out;
  if (me.can_act()) {
    const bool met = leaf.objective == LeafObjective::Offensive ? rt.hit_landed : me.health >= rt.start_health;
    out.status = met ? Status::Success : Status::Failure;
    return out;
  }
  out.status = Status::Running;
  return out;
}

}  // namespace arena
