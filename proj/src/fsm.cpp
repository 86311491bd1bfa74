#include "arena/fsm.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "arena/errors.hpp"

namespace arena {

using nlohmann::json;

std::vector<Action> FsmState::search_pool() const {
  if (!pool.empty()) return pool;
  std::vector<Action> out;
  for (const Tactic& t : tactics)
    if (!t.actions.empty() && std::find(out.begin(), out.end(), t.actions.front()) == out.end())
      out.push_back(t.actions.front());
  return out;
}

FsmDef::FsmDef(std::vector<FsmState> states, std::vector<Transition> transitions, StateId initial,
               TacticSelection selection)
    : states_(std::move(states)), transitions_(std::move(transitions)), selection_(selection) {
  if (states_.empty()) throw ConfigError("FSM needs at least one state");
  std::unordered_set<std::string> seen;
  for (const FsmState& s : states_) {
    if (!seen.insert(s.id).second) throw ConfigError("duplicate FSM state '" + s.id + "'");
    for (const Tactic& t : s.tactics)
      if (t.actions.empty() || t.actions.size() > kMaxTacticLength)
        throw ConfigError("tactic '" + t.name + "' must hold 1.." +
                          std::to_string(kMaxTacticLength) + " actions");
  }
  initial_ = require(initial);
  order_.assign(states_.size(), {});
  target_.reserve(transitions_.size());
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const int from = require(transitions_[i].from);
    target_.push_back(require(transitions_[i].to));
    order_[static_cast<std::size_t>(from)].push_back(static_cast<int>(i));
  }
  for (auto& ord : order_)
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return transitions_[static_cast<std::size_t>(a)].priority >
             transitions_[static_cast<std::size_t>(b)].priority;
    });
}

int FsmDef::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i].id == id) return static_cast<int>(i);
  return -1;
}

int FsmDef::require(std::string_view id) const {
  const int i = index_of(id);
  if (i < 0) throw UnknownState("unknown FSM state '" + std::string(id) + "'");
  return i;
}

std::span<const int> FsmDef::outgoing(int state) const {
  return order_.at(static_cast<std::size_t>(state));
}

FsmStepIndex FsmStepIndex::run(const FsmDef& def, int current, const Features& f) {
  if (current < 0 || static_cast<std::size_t>(current) >= def.states_.size())
    throw UnknownState("FSM state index out of range");
  for (int t : def.order_[static_cast<std::size_t>(current)])
    if (def.transitions_[static_cast<std::size_t>(t)].when.eval(f))
      return {def.target_[static_cast<std::size_t>(t)], t};
  return {current, -1};
}

FsmStep fsm_step(const FsmDef& def, std::string_view current, const Features& f) {
  const auto r = FsmStepIndex::run(def, def.require(current), f);
  FsmStep out{def.state(r.next).id, std::nullopt};
  if (r.fired >= 0) out.fired = def.transitions()[static_cast<std::size_t>(r.fired)];
  return out;
}

// ---------------------------------------------------------------------------

HfsmDef::HfsmDef(std::vector<Superstate> superstates, std::vector<Transition> outer, StateId initial)
    : supers_(std::move(superstates)) {
  std::vector<FsmState> shells;
  shells.reserve(supers_.size());
  for (const Superstate& s : supers_) shells.push_back(FsmState{s.id, {}, {}});
  outer_ = FsmDef(std::move(shells), std::move(outer), std::move(initial));
}

HfsmPosition hfsm_initial(const HfsmDef& def) {
  const Superstate& s = def.super(def.outer_machine().initial_index());
  return {s.id, s.machine.initial()};
}

HfsmPosition hfsm_step(const HfsmDef& def, const HfsmPosition& current, const Features& f) {
  const int sup = def.outer_machine().require(current.super);
  const FsmDef& inner = def.super(sup).machine;
  const int child = inner.require(current.child);
  const auto outer = FsmStepIndex::run(def.outer_machine(), sup, f);
  if (outer.fired >= 0) {
    const Superstate& target = def.super(outer.next);
    return {target.id, target.machine.initial()};
  }
  const auto in = FsmStepIndex::run(inner, child, f);
  return {current.super, inner.state(in.next).id};
}

// ---------------------------------------------------------------------------
// Input reading
// ---------------------------------------------------------------------------

IntentClass counter_intent(IntentClass c) {
  switch (c) {
    case IntentClass::Attack: return IntentClass::Block;
    case IntentClass::Grab: return IntentClass::Attack;
    case IntentClass::Block: return IntentClass::Grab;
    case IntentClass::Move:
    case IntentClass::Idle: return IntentClass::Move;
  }
  return IntentClass::Move;
}

namespace {

Action toward(Facing f) { return f == Facing::Right ? Action::move_right() : Action::move_left(); }
Action away(Facing f) { return f == Facing::Right ? Action::move_left() : Action::move_right(); }

std::vector<std::uint8_t> strikes(const CharacterSpec& spec) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < spec.moves.size(); ++i)
    if (spec.moves[i].type == MoveType::Strike) out.push_back(static_cast<std::uint8_t>(i));
  return out;
}

}  // namespace

Action input_read_policy(IntentClass opponent_intent, double difficulty, Rng& rng,
                         const InputReadContext& ctx) {
  static constexpr std::array<IntentClass, 4> kRandomClasses = {
      IntentClass::Attack, IntentClass::Block, IntentClass::Grab, IntentClass::Move};
  const CharacterSpec& spec = *ctx.spec;
  const auto strike_ids = strikes(spec);
  if (rng.bernoulli(difficulty)) {
    const auto fastest = *std::min_element(strike_ids.begin(), strike_ids.end(), [&](auto a, auto b) {
      return spec.moves[a].startup < spec.moves[b].startup;
    });
    switch (counter_intent(opponent_intent)) {
      case IntentClass::Block: return Action::block();
      case IntentClass::Grab: return Action::grab();
      case IntentClass::Attack: return Action::attack(fastest);
      default:
        if (ctx.distance >= 0 && ctx.distance <= spec.moves[fastest].range) return Action::attack(fastest);
        return toward(ctx.facing);
    }
  }
  switch (kRandomClasses[rng.below(kRandomClasses.size())]) {
    case IntentClass::Attack: return Action::attack(strike_ids[rng.below(strike_ids.size())]);
    case IntentClass::Block: return Action::block();
    case IntentClass::Grab: return Action::grab();
    default: return rng.below(2) == 0 ? toward(ctx.facing) : away(ctx.facing);
  }
}

Action input_reading_act(const GameState& state, Side side, Action opponent_action, double difficulty,
                         Rng& rng) {
  const FighterState& me = state.fighter(side);
  if (!me.can_act()) return Action::idle();
  const IntentClass seen = intent_of(state, other(side), opponent_action);
  const InputReadContext ctx{&state.character(side), me.facing,
                             std::abs(me.position - state.fighter(other(side)).position)};
  Action a;
  if (rng.bernoulli(difficulty)) {
    // a blocker can still act next tick and would stuff a grab in startup
    a = seen == IntentClass::Block ? Action::block() : input_read_policy(seen, 1.0, rng, ctx);
  } else {
    a = input_read_policy(seen, 0.0, rng, ctx);
  }
  return is_legal(state, side, a) ? a : Action::idle();
}

// ---------------------------------------------------------------------------
// Tactic execution
// ---------------------------------------------------------------------------

namespace detail {

void select_tactic(const FsmState& state, int state_index, FsmAgentState& st, TacticSelection mode,
                   Rng* rng) {
  if (state.tactics.empty())
    throw ConfigError("FSM state '" + state.id + "' has an empty tactic pool");
  if (st.round_robin.size() <= static_cast<std::size_t>(state_index))
    st.round_robin.resize(static_cast<std::size_t>(state_index) + 1, 0);
  std::size_t pick = 0;
  if (mode == TacticSelection::Weighted && rng) {
    double total = 0;
    for (const Tactic& t : state.tactics) total += std::max(0.0, t.weight);
    double x = rng->uniform() * total;
    for (pick = 0; pick + 1 < state.tactics.size(); ++pick) {
      x -= std::max(0.0, state.tactics[pick].weight);
      if (x < 0) break;
    }
  } else {
    auto& rr = st.round_robin[static_cast<std::size_t>(state_index)];
    pick = rr % state.tactics.size();
    ++rr;
  }
  st.cursor = {static_cast<int>(pick), 0};
}

bool should_abort(const Tactic& t, const Observation& obs) {
  return (t.abort_on_blocked_hit && obs.last_hit_blocked) || (t.abort_on_took_hit && obs.took_hit);
}

Action next_tactic_action(const FsmState& state, FsmAgentState& st, const Observation& obs,
                          std::span<const Action> legal) {
  if (!obs.can_act) return Action::idle();
  const Tactic& t = state.tactics[static_cast<std::size_t>(st.cursor.tactic)];
  const Action a = oriented(t.actions[st.cursor.index++], obs.facing);
  if (a.kind == ActionKind::Idle || legal.empty()) return a;
  return std::find(legal.begin(), legal.end(), a) != legal.end() ? a : Action::idle();
}

}  // namespace detail

Action fsm_agent_act(const FsmDef& def, FsmAgentState& st, const Observation& obs,
                     std::span<const Action> legal, Rng* rng) {
  bool reselect = false;
  if (st.state < 0) {
    st.state = def.initial_index();
    reselect = true;
  } else {
    const auto r = FsmStepIndex::run(def, st.state, Features::from(obs));
    if (r.fired >= 0) {
      st.state = r.next;  // a self-transition restarts the tactic too
      reselect = true;
    }
  }
  const FsmState& state = def.state(st.state);
  if (!reselect) {
    if (st.cursor.tactic < 0) {
      reselect = true;
    } else {
      const Tactic& t = state.tactics[static_cast<std::size_t>(st.cursor.tactic)];
      reselect = detail::should_abort(t, obs) || (obs.can_act && st.cursor.index >= t.actions.size());
    }
  }
  if (reselect) detail::select_tactic(state, st.state, st, def.selection(), rng);
  return detail::next_tactic_action(state, st, obs, legal);
}

Action hfsm_agent_act(const HfsmDef& def, HfsmAgentState& st, const Observation& obs,
                      std::span<const Action> legal, Rng* rng) {
  const Features f = Features::from(obs);
  if (st.super < 0) {
    st.super = def.outer_machine().initial_index();
    st.inner = {};
  } else {
    const auto outer = FsmStepIndex::run(def.outer_machine(), st.super, f);
    if (outer.fired >= 0) {
      st.super = outer.next;
      st.inner.state = -1;  // re-enter at the child machine's initial state
      st.inner.cursor = {};
    }
  }
  return fsm_agent_act(def.super(st.super).machine, st.inner, obs, legal, rng);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

Action action_from(const json& j, const CharacterSpec& spec) {
  const auto id = j.get<std::string>();
  auto a = parse_action(id, spec);
  if (!a) throw ConfigError("unknown action '" + id + "' for character '" + spec.name + "'");
  return *a;
}

Transition transition_from(const json& j) {
  Transition t;
  t.from = j.at("from").get<std::string>();
  t.to = j.at("to").get<std::string>();
  t.when = j.contains("when") ? Condition::from_json(j.at("when")) : Condition::always();
  t.priority = j.value("priority", 0);
  return t;
}

json transition_to(const Transition& t) {
  return json{{"from", t.from}, {"to", t.to}, {"when", t.when.to_json()}, {"priority", t.priority}};
}

}  // namespace

Tactic tactic_from_json(const json& j, const CharacterSpec& spec) {
  Tactic t;
  const json* actions = &j;
  if (j.is_object()) {
    t.name = j.value("name", "");
    t.weight = j.value("weight", 1.0);
    if (j.contains("abort_on"))
      for (const auto& a : j.at("abort_on")) {
        const auto s = a.get<std::string>();
        if (s == "blocked_hit") t.abort_on_blocked_hit = true;
        else if (s == "took_hit") t.abort_on_took_hit = true;
        else throw ConfigError("unknown abort_on condition '" + s + "'");
      }
    actions = &j.at("actions");
  }
  if (!actions->is_array()) throw ConfigError("tactic actions must be an array");
  for (const auto& a : *actions) t.actions.push_back(action_from(a, spec));
  if (t.name.empty()) {
    for (std::size_t i = 0; i < t.actions.size(); ++i)
      t.name += (i ? "," : "") + action_id(t.actions[i], spec);
  }
  return t;
}

json tactic_to_json(const Tactic& t, const CharacterSpec& spec) {
  json actions = json::array();
  for (Action a : t.actions) actions.push_back(action_id(a, spec));
  json abort = json::array();
  if (t.abort_on_blocked_hit) abort.push_back("blocked_hit");
  if (t.abort_on_took_hit) abort.push_back("took_hit");
  json out{{"name", t.name}, {"actions", actions}, {"abort_on", abort}};
  if (t.weight != 1.0) out["weight"] = t.weight;
  return out;
}

FsmDef FsmDef::from_json(const json& j, const CharacterSpec& spec) {
  try {
    std::vector<FsmState> states;
    for (const auto& sj : j.at("states")) {
      FsmState s;
      s.id = sj.at("id").get<std::string>();
      if (sj.contains("tactics"))
        for (const auto& tj : sj.at("tactics")) s.tactics.push_back(tactic_from_json(tj, spec));
      if (sj.contains("pool"))
        for (const auto& aj : sj.at("pool")) s.pool.push_back(action_from(aj, spec));
      states.push_back(std::move(s));
    }
    std::vector<Transition> transitions;
    if (j.contains("transitions"))
      for (const auto& tj : j.at("transitions")) transitions.push_back(transition_from(tj));
    const auto sel = j.value("selection", std::string("round_robin"));
    TacticSelection mode = TacticSelection::RoundRobin;
    if (sel == "weighted") mode = TacticSelection::Weighted;
    else if (sel != "round_robin") throw ConfigError("unknown tactic selection '" + sel + "'");
    return FsmDef(std::move(states), std::move(transitions), j.at("initial").get<std::string>(), mode);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed FSM definition: ") + e.what());
  }
}

json FsmDef::to_json(const CharacterSpec& spec) const {
  json states = json::array();
  for (const FsmState& s : states_) {
    json tactics = json::array();
    for (const Tactic& t : s.tactics) tactics.push_back(tactic_to_json(t, spec));
    json sj{{"id", s.id}, {"tactics", tactics}};
    if (!s.pool.empty()) {
      json pool = json::array();
      for (Action a : s.pool) pool.push_back(action_id(a, spec));
      sj["pool"] = pool;
    }
    states.push_back(std::move(sj));
  }
  json transitions = json::array();
  for (const Transition& t : transitions_) transitions.push_back(transition_to(t));
  return json{{"initial", initial()},
              {"states", states},
              {"transitions", transitions},
              {"selection", selection_ == TacticSelection::Weighted ? "weighted" : "round_robin"}};
}

HfsmDef HfsmDef::from_json(const json& j, const CharacterSpec& spec) {
  try {
    std::vector<Superstate> supers;
    for (const auto& sj : j.at("superstates"))
      supers.push_back({sj.at("id").get<std::string>(), FsmDef::from_json(sj.at("machine"), spec)});
    std::vector<Transition> outer;
    if (j.contains("transitions"))
      for (const auto& tj : j.at("transitions")) outer.push_back(transition_from(tj));
    return HfsmDef(std::move(supers), std::move(outer), j.at("initial").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed HFSM definition: ") + e.what());
  }
}

}  // namespace arena
