#pragma once

// Fixtures and reference implementations shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/bt.hpp"
#include "arena/engine.hpp"
#include "arena/fsm.hpp"
#include "arena/io.hpp"
#include "arena/miner.hpp"
#include "arena/rng.hpp"

namespace arena::testing {

inline std::shared_ptr<const Ruleset> default_rules() {
  static const auto rules = [] {
    auto r = std::make_shared<Ruleset>();
    r->characters = {default_character(), default_character()};
    return std::shared_ptr<const Ruleset>(r);
  }();
  return rules;
}

inline GameState fresh_state(std::uint64_t seed = 0) { return new_match(default_rules(), seed); }

/// Both fighters in grab range, one grab from a knockout, three ticks left on
/// the clock. A grab started now lands on the last tick; nothing else can
/// land before time runs out, which leaves the round drawn on health.
inline GameState last_exchange_state() {
  GameState s = fresh_state();
  s.fighters[0].position = 48;
  s.fighters[1].position = 52;
  s.fighters[0].health = 10;
  s.fighters[1].health = 10;
  s.timer = 3;
  return s;
}

/// Plays `first` for `side`, then Idle, with the opponent always blocking;
/// returns the round payoff for `side` (1 win, 0.5 draw, 0 loss).
inline double one_ply_payoff(const GameState& start, Side side, Action first) {
  GameState s = start;
  bool opening = true;
  while (!round_result(s)) {
    const Action mine = opening ? first : Action::idle();
    opening = false;
    const Side opp = other(side);
    const Action theirs = s.fighter(opp).can_act() ? Action::block() : Action::idle();
    if (side == Side::Left) advance(s, mine, theirs);
    else advance(s, theirs, mine);
  }
  const RoundResult r = *round_result(s);
  if (r.winner == Winner::Draw) return 0.5;
  return (r.winner == Winner::Left) == (side == Side::Left) ? 1.0 : 0.0;
}

// Independent restatement of the triad: what beats what.
inline InteractionOutcome triad_table(IntentClass l, IntentClass r) {
  using I = IntentClass;
  static const std::map<std::pair<I, I>, InteractionOutcome> wins = {
      {{I::Attack, I::Grab}, InteractionOutcome::LeftWins},
      {{I::Grab, I::Block}, InteractionOutcome::LeftWins},
      {{I::Block, I::Attack}, InteractionOutcome::LeftWins},
      {{I::Attack, I::Move}, InteractionOutcome::LeftWins},
      {{I::Attack, I::Idle}, InteractionOutcome::LeftWins},
      {{I::Grab, I::Move}, InteractionOutcome::LeftWins},
      {{I::Grab, I::Idle}, InteractionOutcome::LeftWins},
  };
  if (wins.count({l, r})) return InteractionOutcome::LeftWins;
  if (wins.count({r, l})) return InteractionOutcome::RightWins;
  if (l == I::Attack && r == I::Attack) return InteractionOutcome::Trade;
  return InteractionOutcome::Neutral;
}

inline InteractionOutcome mirrored(InteractionOutcome o) {
  if (o == InteractionOutcome::LeftWins) return InteractionOutcome::RightWins;
  if (o == InteractionOutcome::RightWins) return InteractionOutcome::LeftWins;
  return o;
}

inline std::filesystem::path data_path(const std::string& rel) { return data_dir() / rel; }

inline FsmDef load_fsm(const std::string& rel) {
  return FsmDef::from_json(read_json_file(data_path(rel)), default_character());
}

inline HfsmDef load_hfsm(const std::string& rel) {
  return HfsmDef::from_json(read_json_file(data_path(rel)), default_character());
}

inline Features event(const std::string& name) {
  Features f;
  f.set(name, 1.0);
  return f;
}

// ---------------------------------------------------------------------------
// Hierarchical machine flattening
// ---------------------------------------------------------------------------

/// Flattened state ids read "super/child".
inline FsmDef flatten(const HfsmDef& h) {
  std::vector<FsmState> states;
  std::vector<Transition> transitions;
  for (const Superstate& s : h.superstates())
    for (const FsmState& c : s.machine.states()) states.push_back({s.id + "/" + c.id, {}, {}});
  // outer transitions outrank every inner one and are copied onto each child
  int top = 0;
  for (const Superstate& s : h.superstates())
    for (const Transition& t : s.machine.transitions()) top = std::max(top, t.priority);
  int low = 0;
  for (const Transition& t : h.outer()) low = std::min(low, t.priority);
  for (const Superstate& s : h.superstates()) {
    for (const FsmState& c : s.machine.states()) {
      const std::string from = s.id + "/" + c.id;
      for (int ti : h.outer_machine().outgoing(h.index_of(s.id))) {
        const Transition& t = h.outer()[static_cast<std::size_t>(ti)];
        const Superstate& target = h.super(h.index_of(t.to));
        transitions.push_back({from, target.id + "/" + target.machine.initial(), t.when, top + 1 - low + t.priority});
      }
      for (int ti : s.machine.outgoing(s.machine.index_of(c.id))) {
        const Transition& t = s.machine.transitions()[static_cast<std::size_t>(ti)];
        transitions.push_back({from, s.id + "/" + t.to, t.when, t.priority});
      }
    }
  }
  const Superstate& init = h.super(h.index_of(h.initial()));
  return FsmDef(std::move(states), std::move(transitions), init.id + "/" + init.machine.initial());
}

// ---------------------------------------------------------------------------
// Behavior trees
// ---------------------------------------------------------------------------

/// Random tree of constant leaves; composites get 1..max_fanout children.
inline BtNode random_constant_tree(Rng& rng, int max_depth, int max_fanout) {
  if (max_depth <= 1 || rng.below(3) == 0) return BtNode::constant(rng.below(2) == 0);
  std::vector<BtNode> kids;
  const std::size_t n = 1 + rng.below(static_cast<std::size_t>(max_fanout));
  for (std::size_t i = 0; i < n; ++i) kids.push_back(random_constant_tree(rng, max_depth - 1, max_fanout));
  return rng.below(2) == 0 ? BtNode::selector(std::move(kids)) : BtNode::sequencer(std::move(kids));
}

inline int tree_depth(const BtNode& n) {
  int d = 0;
  for (const BtNode& c : n.children) d = std::max(d, tree_depth(c));
  return d + 1;
}

inline std::size_t tree_fanout(const BtNode& n) {
  std::size_t f = n.children.size();
  for (const BtNode& c : n.children) f = std::max(f, tree_fanout(c));
  return f;
}

/// Swaps Success/Failure leaves and Selector/Sequencer composites.
inline BtNode dual(const BtNode& n) {
  if (n.kind == BtNode::Kind::Condition) return BtNode::constant(n.condition.op() != Condition::Op::True);
  std::vector<BtNode> kids;
  for (const BtNode& c : n.children) kids.push_back(dual(c));
  return n.kind == BtNode::Kind::Selector ? BtNode::sequencer(std::move(kids)) : BtNode::selector(std::move(kids));
}

/// Leaf ids (pre-order numbering) that a short-circuiting evaluation visits.
inline void expected_visits(const BtNode& n, int& next_id, std::vector<int>& out, Status& result) {
  const int id = next_id++;
  if (n.kind == BtNode::Kind::Condition) {
    out.push_back(id);
    result = n.condition.op() == Condition::Op::True ? Status::Success : Status::Failure;
    return;
  }
  const bool selector = n.kind == BtNode::Kind::Selector;
  const Status stop = selector ? Status::Success : Status::Failure;
  result = selector ? Status::Failure : Status::Success;
  bool stopped = false;
  for (const BtNode& c : n.children) {
    if (stopped) {
      // skip the whole subtree, keeping the numbering
      std::vector<int> ignored;
      Status s;
      expected_visits(c, next_id, ignored, s);
      continue;
    }
    Status s;
    expected_visits(c, next_id, out, s);
    if (s == stop) {
      result = stop;
      stopped = true;
    }
  }
}

// ---------------------------------------------------------------------------
// N-gram counting
// ---------------------------------------------------------------------------

/// Counts every window [i, i+n) whose labels all agree, by direct enumeration.
inline NGramCounts brute_force_counts(const std::vector<ActionLog>& logs, int max_len) {
  NGramCounts out;
  for (const ActionLog& log : logs) {
    const std::size_t len = log.actions.size();
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t n = 1; n <= static_cast<std::size_t>(max_len) && i + n <= len; ++n) {
        bool same = true;
        for (std::size_t k = i; k < i + n; ++k) same = same && log.labels[k] == log.labels[i];
        if (!same) continue;
        NGram g(log.actions.begin() + static_cast<std::ptrdiff_t>(i),
                log.actions.begin() + static_cast<std::ptrdiff_t>(i + n));
        ++out[log.labels[i]][g];
      }
  }
  return out;
}

inline std::vector<ActionLog> synthetic_logs(std::uint64_t seed, std::size_t count) {
  static const std::vector<std::string> labels = {"close/even", "mid/ahead", "far/behind"};
  static const std::vector<std::string> actions = {"Attack:Punch", "Attack:Heavy", "Grab", "Block",
                                                   "MoveLeft",     "MoveRight",    "Idle"};
  Rng rng(seed);
  std::vector<ActionLog> logs;
  for (std::size_t l = 0; l < count; ++l) {
    ActionLog log;
    const std::size_t len = 1 + rng.below(80);
    std::size_t label = rng.below(labels.size());
    for (std::size_t i = 0; i < len; ++i) {
      if (rng.below(6) == 0) label = rng.below(labels.size());
      log.labels.push_back(labels[label]);
      // skewed toward the front of the action list
      const std::size_t a = std::min(rng.below(actions.size()), rng.below(actions.size()));
      log.actions.push_back(actions[a]);
    }
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace arena::testing
