#include "arena/agents.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "arena/bt.hpp"
#include "arena/errors.hpp"
#include "arena/fsm.hpp"
#include "arena/hybrid.hpp"
#include "arena/mcts.hpp"

namespace arena {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<AgentKind, std::string_view>, 10> kKindNames{{
    {AgentKind::Random, "random"},
    {AgentKind::InputReading, "input_reading"},
    {AgentKind::Fsm, "fsm"},
    {AgentKind::Hfsm, "hfsm"},
    {AgentKind::Bt, "bt"},
    {AgentKind::Mcts, "mcts"},
    {AgentKind::FsmMcts, "fsm_mcts"},
    {AgentKind::MctsTransitions, "mcts_transitions"},
    {AgentKind::BtMcts, "bt_mcts"},
    {AgentKind::Human, "human"},
}};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    if (!ctx.obs.can_act) return Action::idle();
    return ctx.legal[rng_.below(ctx.legal.size())];
  }

 private:
  Rng rng_;
};

class InputReadingAgent : public Agent {
 public:
  InputReadingAgent(double difficulty, std::uint64_t seed) : difficulty_(difficulty), rng_(seed) {}
  bool reads_input() const override { return true; }
  Action decide(const DecisionContext& ctx) override {
    return input_reading_act(ctx.state, ctx.side, ctx.opponent_action.value_or(Action::idle()), difficulty_,
                             rng_);
  }

 private:
  double difficulty_;
  Rng rng_;
};

class FsmAgent : public Agent {
 public:
  FsmAgent(FsmDef def, std::uint64_t seed) : def_(std::move(def)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    return fsm_agent_act(def_, st_, ctx.obs, {ctx.legal.data(), ctx.legal.size()}, &rng_);
  }
  std::optional<std::string> annotation() const override {
    if (st_.state < 0) return def_.initial();
    return def_.state(st_.state).id;
  }
  void on_round_start() override { st_ = {}; }

 private:
  FsmDef def_;
  FsmAgentState st_;
  Rng rng_;
};

class HfsmAgent : public Agent {
 public:
  HfsmAgent(HfsmDef def, std::uint64_t seed) : def_(std::move(def)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    return hfsm_agent_act(def_, st_, ctx.obs, {ctx.legal.data(), ctx.legal.size()}, &rng_);
  }
  std::optional<std::string> annotation() const override {
    if (st_.super < 0) return std::nullopt;
    const FsmDef& inner = def_.super(st_.super).machine;
    const std::string child = st_.inner.state < 0 ? inner.initial() : inner.state(st_.inner.state).id;
    return def_.super(st_.super).id + "/" + child;
  }
  void on_round_start() override { st_ = {}; }

 private:
  HfsmDef def_;
  HfsmAgentState st_;
  Rng rng_;
};

class BtAgent : public Agent {
 public:
  BtAgent(BtTree tree, std::uint64_t seed)
      : tree_(std::move(tree)), rt_(BtRuntime::for_tree(tree_)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    BtContext bc{ctx.obs, &ctx.state, ctx.side, {ctx.legal.data(), ctx.legal.size()}, &rng_};
    BtTickResult r = tick(tree_, rt_, bc);
    // a traversal that finished without choosing gets one fresh pass
    if (!r.action && r.status != Status::Running && ctx.obs.can_act) r = tick(tree_, rt_, bc);
    if (!r.action || !ctx.obs.can_act) return Action::idle();
    return *r.action;
  }
  void on_round_start() override { rt_.reset(); }

 private:
  BtTree tree_;
  BtRuntime rt_;
  Rng rng_;
};

class MctsAgent : public Agent {
 public:
  MctsAgent(MctsConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    branching_ = 0;
    if (!ctx.obs.can_act) return Action::idle();
    if (ctx.legal.size() == 1) return ctx.legal.front();
    const PlanResult r = plan(ctx.state, ctx.side, cfg_, rng_);
    branching_ = r.root_branching;
    return r.action;
  }
  std::size_t last_branching() const override { return branching_; }

 private:
  MctsConfig cfg_;
  Rng rng_;
  std::size_t branching_ = 0;
};

class FsmMctsAgent : public Agent {
 public:
  FsmMctsAgent(FsmDef def, MctsConfig cfg, std::uint64_t seed)
      : def_(std::move(def)), cfg_(std::move(cfg)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    const HybridDecision d = fsm_mcts_act(def_, st_, ctx.state, ctx.side, cfg_, rng_);
    branching_ = d.searched ? d.root_branching : 0;
    return d.action;
  }
  std::optional<std::string> annotation() const override {
    return def_.state(st_.state < 0 ? def_.initial_index() : st_.state).id;
  }
  std::size_t last_branching() const override { return branching_; }
  void on_round_start() override { st_.state = -1; }

 private:
  FsmDef def_;
  MctsConfig cfg_;
  FsmMctsAgentState st_;
  Rng rng_;
  std::size_t branching_ = 0;
};

class TransitionAgent : public Agent {
 public:
  TransitionAgent(FsmDef def, TransitionSearchConfig cfg, std::uint64_t seed)
      : def_(std::move(def)), cfg_(std::move(cfg)), rng_(seed) {}
  Action decide(const DecisionContext& ctx) override {
    const std::int32_t before = st_.commit_until;
    const Action a = mcts_transition_act(def_, st_, ctx.state, ctx.side, cfg_, rng_);
    branching_ = st_.commit_until != before ? st_.last_branching : 0;
    return a;
  }
  std::optional<std::string> annotation() const override {
    return def_.state(st_.state < 0 ? def_.initial_index() : st_.state).id;
  }
  std::size_t last_branching() const override { return branching_; }
  void on_round_start() override { st_ = {}; }

 private:
  FsmDef def_;
  TransitionSearchConfig cfg_;
  TransitionAgentState st_;
  Rng rng_;
  std::size_t branching_ = 0;
};

const json& need(const json& params, const char* key, AgentKind kind) {
  if (!params.contains(key))
    throw AgentInitError(std::string(to_string(kind)) + " agent needs '" + key + "'");
  return params.at(key);
}

}  // namespace

std::string_view to_string(AgentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

AgentKind parse_agent_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  throw ConfigError("unknown agent kind '" + std::string(s) + "'");
}

json AgentSpec::to_json() const {
  json out = params;
  out["kind"] = std::string(to_string(kind));
  if (!name.empty()) out["name"] = name;
  return out;
}

AgentSpec AgentSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("agent spec needs a string 'kind'");
  AgentSpec s;
  s.kind = parse_agent_kind(j.at("kind").get<std::string>());
  s.name = j.value("name", std::string{});
  s.params = j;
  s.params.erase("kind");
  s.params.erase("name");
  return s;
}

Action HumanAgent::decide(const DecisionContext& ctx) {
  const std::optional<Action> a = std::exchange(pending_, std::nullopt);
  if (!a || !ctx.obs.can_act) return Action::idle();
  return is_legal(ctx.state, ctx.side, *a) ? *a : Action::idle();
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const CharacterSpec& self,
                                  const CharacterSpec& opponent, std::uint64_t seed) {
  const json& p = spec.params;
  auto mcts_cfg = [&] {
    return MctsConfig::from_json(p.contains("mcts") ? p.at("mcts") : json::object(), opponent);
  };
  try {
    switch (spec.kind) {
      case AgentKind::Random: return std::make_unique<RandomAgent>(seed);
      case AgentKind::InputReading: {
        const double d = p.value("difficulty", 1.0);
        if (d < 0.0 || d > 1.0) throw AgentInitError("input_reading difficulty must lie in [0,1]");
        return std::make_unique<InputReadingAgent>(d, seed);
      }
      case AgentKind::Fsm:
        return std::make_unique<FsmAgent>(FsmDef::from_json(need(p, "fsm", spec.kind), self), seed);
      case AgentKind::Hfsm:
        return std::make_unique<HfsmAgent>(HfsmDef::from_json(need(p, "hfsm", spec.kind), self), seed);
      case AgentKind::Bt:
      case AgentKind::BtMcts:
        return std::make_unique<BtAgent>(BtTree::from_json(need(p, "tree", spec.kind), self, opponent), seed);
      case AgentKind::Mcts: return std::make_unique<MctsAgent>(mcts_cfg(), seed);
      case AgentKind::FsmMcts: {
        FsmDef def = FsmDef::from_json(need(p, "fsm", spec.kind), self);
        validate_pools(def, self);
        return std::make_unique<FsmMctsAgent>(std::move(def), mcts_cfg(), seed);
      }
      case AgentKind::MctsTransitions: {
        TransitionSearchConfig cfg{mcts_cfg(), p.value("horizon", 10)};
        if (cfg.horizon < 1) throw AgentInitError("mcts_transitions horizon must be >= 1");
        return std::make_unique<TransitionAgent>(FsmDef::from_json(need(p, "fsm", spec.kind), self),
                                                 std::move(cfg), seed);
      }
      case AgentKind::Human: return std::make_unique<HumanAgent>();
    }
  } catch (const AgentInitError&) {
    throw;
  } catch (const Error& e) {
    throw AgentInitError(std::string(to_string(spec.kind)) + " agent: " + e.what());
  } catch (const json::exception& e) {
    throw AgentInitError(std::string(to_string(spec.kind)) + " agent: " + e.what());
  }
  throw AgentInitError("unsupported agent kind");
}

}  // namespace arena
