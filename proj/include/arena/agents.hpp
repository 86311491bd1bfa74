#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "arena/engine.hpp"
#include "arena/rng.hpp"

namespace arena {

enum class AgentKind : std::uint8_t {
  Random,
  InputReading,
  Fsm,
  Hfsm,
  Bt,
  Mcts,
  FsmMcts,
  MctsTransitions,
  BtMcts,
  Human,
};

std::string_view to_string(AgentKind k);
/// Throws ConfigError for an unknown kind.
AgentKind parse_agent_kind(std::string_view s);

/// Kind plus its parameters. Referenced definition files are already inlined
/// (see load_agent_spec), so a spec is self-contained.
struct AgentSpec {
  AgentKind kind = AgentKind::Random;
  std::string name;
  nlohmann::json params = nlohmann::json::object();

  std::string display_name() const { return name.empty() ? std::string(to_string(kind)) : name; }
  nlohmann::json to_json() const;
  static AgentSpec from_json(const nlohmann::json& j);
};

struct DecisionContext {
  const GameState& state;
  Side side;
  Observation obs;
  ActionSet legal;
  /// The opponent's action for this tick; given only to agents that read input.
  std::optional<Action> opponent_action;
};

class Agent {
 public:
  virtual ~Agent() = default;

  /// Called every tick. Agents that cannot act return Idle.
  virtual Action decide(const DecisionContext& ctx) = 0;
  /// Readers decide after their opponent and see its action.
  virtual bool reads_input() const { return false; }
  /// Current FSM state for replay annotations, when the agent has one.
  virtual std::optional<std::string> annotation() const { return std::nullopt; }
  /// Root branching factor of the most recent search, 0 when none ran.
  virtual std::size_t last_branching() const { return 0; }
  virtual void on_round_start() {}
};

/// Input source for a human-controlled side; the latest submitted action is
/// applied on the next tick, Idle when nothing was submitted.
class HumanAgent : public Agent {
 public:
  void submit(Action a) { pending_ = a; }
  Action decide(const DecisionContext& ctx) override;

 private:
  std::optional<Action> pending_;
};

/// Throws AgentInitError when the parameters do not describe a valid agent.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const CharacterSpec& self,
                                  const CharacterSpec& opponent, std::uint64_t seed);

}  // namespace arena
