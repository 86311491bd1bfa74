#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arena/condition.hpp"
#include "arena/engine.hpp"
#include "arena/fsm.hpp"
#include "arena/mcts.hpp"
#include "arena/rng.hpp"

namespace arena {

enum class Status : std::uint8_t { Success, Failure, Running };
std::string_view to_string(Status s);

enum class LeafObjective : std::uint8_t {
  Offensive,  // succeeds when a hit connected
  Defensive,  // succeeds when no damage was taken
};

/// A leaf that hands the choice of move to a restricted search.
struct MctsLeafSpec {
  MctsConfig config;
  std::vector<Action> pool;
  LeafObjective objective = LeafObjective::Offensive;
};

/// Tree authoring form. Composites need at least one child.
struct BtNode {
  enum class Kind : std::uint8_t { Selector, Sequencer, Condition, Action, Mcts };

  Kind kind = Kind::Selector;
  std::string name;
  std::vector<BtNode> children;
  Condition condition;  // Condition
  Tactic tactic;        // Action (a primitive action is a one-step tactic)
  MctsLeafSpec mcts;    // Mcts

  static BtNode selector(std::vector<BtNode> children, std::string name = {});
  static BtNode sequencer(std::vector<BtNode> children, std::string name = {});
  static BtNode check(Condition c, std::string name = {});
  static BtNode constant(bool success) { return check(success ? Condition::always() : Condition::never()); }
  static BtNode act(Tactic t, std::string name = {});
  static BtNode act(Action a, std::string name = {});
  static BtNode search(MctsLeafSpec spec, std::string name = {});
};

/// Flattened immutable tree; node 0 is the root and ids follow pre-order.
class BtTree {
 public:
  struct Node {
    BtNode::Kind kind;
    std::string name;
    std::vector<int> children;
    Condition condition;
    Tactic tactic;
    MctsLeafSpec mcts;
  };

  /// Throws MalformedTree for an empty composite.
  explicit BtTree(const BtNode& root);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  static BtTree from_json(const nlohmann::json& j, const CharacterSpec& self,
                          const CharacterSpec& opponent);

 private:
  int add(const BtNode& n);
  std::vector<Node> nodes_;
};

struct MctsLeafRuntime {
  bool started = false;
  Action action;
  int start_health = 0;
  bool hit_landed = false;
};

/// Per-fighter execution state of a tree.
struct BtRuntime {
  std::vector<int> running_child;  // per composite: index of its Running child, -1 otherwise
  std::vector<std::size_t> cursor;  // per action leaf
  std::vector<MctsLeafRuntime> leaf;  // per search leaf
  bool active = false;  // last tick ended Running

  static BtRuntime for_tree(const BtTree& tree);

  /// Node ids from the root down the branch that will resume next tick;
  /// empty when the last tick finished with Success or Failure.
  std::vector<int> resume_path(const BtTree& tree) const;
  void reset();
};

/// What a tick can see. `state` is needed only by search leaves.
struct BtContext {
  Observation obs;
  const GameState* state = nullptr;
  Side side = Side::Left;
  std::span<const Action> legal;
  Rng* rng = nullptr;
};

struct BtTickResult {
  Status status = Status::Failure;
  std::optional<Action> action;
  std::vector<int> visited_leaves;  // leaf ids in evaluation order
};

/// One tick with memory semantics: composites resume at the child that was
/// Running on the previous tick. At most one leaf emits an action per tick;
/// an action leaf reached after another leaf already emitted returns Running
/// and emits on the next tick.
BtTickResult tick(const BtTree& tree, BtRuntime& rt, const BtContext& ctx);

/// Reference evaluation for trees whose leaves are constant conditions.
Status bt_oracle(const BtNode& node);

}  // namespace arena
