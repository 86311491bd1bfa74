#include "arena/bt.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "arena/errors.hpp"
#include "arena/hybrid.hpp"

namespace arena {

using nlohmann::json;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Success: return "Success";
    case Status::Failure: return "Failure";
    case Status::Running: return "Running";
  }
  return "?";
}

BtNode BtNode::selector(std::vector<BtNode> children, std::string name) {
  BtNode n;
  n.kind = Kind::Selector;
  n.children = std::move(children);
  n.name = std::move(name);
  return n;
}

BtNode BtNode::sequencer(std::vector<BtNode> children, std::string name) {
  BtNode n = selector(std::move(children), std::move(name));
  n.kind = Kind::Sequencer;
  return n;
}

BtNode BtNode::check(Condition c, std::string name) {
  BtNode n;
  n.kind = Kind::Condition;
  n.condition = std::move(c);
  n.name = std::move(name);
  return n;
}

BtNode BtNode::act(Tactic t, std::string name) {
  BtNode n;
  n.kind = Kind::Action;
  n.tactic = std::move(t);
  n.name = std::move(name);
  return n;
}

BtNode BtNode::act(Action a, std::string name) {
  Tactic t;
  t.actions.push_back(a);
  return act(std::move(t), std::move(name));
}

BtNode BtNode::search(MctsLeafSpec spec, std::string name) {
  BtNode n;
  n.kind = Kind::Mcts;
  n.mcts = std::move(spec);
  n.name = std::move(name);
  return n;
}

// ---------------------------------------------------------------------------

BtTree::BtTree(const BtNode& root) { add(root); }

int BtTree::add(const BtNode& n) {
  const bool composite = n.kind == BtNode::Kind::Selector || n.kind == BtNode::Kind::Sequencer;
  if (composite && n.children.empty())
    throw MalformedTree("composite node '" + n.name + "' has no children");
  if (!composite && !n.children.empty())
    throw MalformedTree("leaf node '" + n.name + "' cannot have children");
  if (n.kind == BtNode::Kind::Action && n.tactic.actions.empty())
    throw MalformedTree("action leaf '" + n.name + "' has no actions");
  if (n.kind == BtNode::Kind::Mcts && n.mcts.pool.empty())
    throw MalformedTree("search leaf '" + n.name + "' has an empty pool");
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{n.kind, n.name, {}, n.condition, n.tactic, n.mcts});
  for (const BtNode& c : n.children) {
    const int cid = add(c);
    nodes_[static_cast<std::size_t>(id)].children.push_back(cid);
  }
  return id;
}

BtRuntime BtRuntime::for_tree(const BtTree& tree) {
  BtRuntime rt;
  rt.running_child.assign(tree.size(), -1);
  rt.cursor.assign(tree.size(), 0);
  rt.leaf.assign(tree.size(), {});
  return rt;
}

std::vector<int> BtRuntime::resume_path(const BtTree& tree) const {
  std::vector<int> path;
  if (!active) return path;
  int node = 0;
  path.push_back(node);
  while (running_child[static_cast<std::size_t>(node)] >= 0) {
    node = tree.node(node).children[static_cast<std::size_t>(running_child[static_cast<std::size_t>(node)])];
    path.push_back(node);
  }
  return path;
}

void BtRuntime::reset() {
  std::fill(running_child.begin(), running_child.end(), -1);
  std::fill(cursor.begin(), cursor.end(), 0);
  std::fill(leaf.begin(), leaf.end(), MctsLeafRuntime{});
  active = false;
}

// ---------------------------------------------------------------------------

namespace {

struct Ticker {
  const BtTree& tree;
  BtRuntime& rt;
  const BtContext& ctx;
  BtTickResult& out;

  Status eval(int id, bool resume) {
    const BtTree::Node& n = tree.node(id);
    switch (n.kind) {
      case BtNode::Kind::Selector:
      case BtNode::Kind::Sequencer: return composite(id, n, resume);
      case BtNode::Kind::Condition:
        out.visited_leaves.push_back(id);
        return n.condition.eval(ctx.obs) ? Status::Success : Status::Failure;
      case BtNode::Kind::Action: return action_leaf(id, n, resume);
      case BtNode::Kind::Mcts: return search_leaf(id, n, resume);
    }
    return Status::Failure;
  }

  Status composite(int id, const BtTree::Node& n, bool resume) {
    const bool selector = n.kind == BtNode::Kind::Selector;
    int& running = rt.running_child[static_cast<std::size_t>(id)];
    const int start = resume && running >= 0 ? running : 0;
    const bool resuming_child = resume && running >= 0;
    running = -1;
    for (int i = start; i < static_cast<int>(n.children.size()); ++i) {
      const Status s = eval(n.children[static_cast<std::size_t>(i)], resuming_child && i == start);
      if (s == Status::Running) {
        running = i;
        return Status::Running;
      }
      if (selector && s == Status::Success) return Status::Success;
      if (!selector && s == Status::Failure) return Status::Failure;
    }
    return selector ? Status::Failure : Status::Success;
  }

  bool allowed(Action a) const {
    if (a.kind == ActionKind::Idle || ctx.legal.empty()) return true;
    return std::find(ctx.legal.begin(), ctx.legal.end(), a) != ctx.legal.end();
  }

  Status action_leaf(int id, const BtTree::Node& n, bool resume) {
    out.visited_leaves.push_back(id);
    std::size_t& cur = rt.cursor[static_cast<std::size_t>(id)];
    if (!resume) cur = 0;
    if (resume && cur > 0 && detail::should_abort(n.tactic, ctx.obs)) return Status::Failure;
    if (out.action || !ctx.obs.can_act) return Status::Running;
    if (cur >= n.tactic.actions.size()) return Status::Success;
    const Action a = oriented(n.tactic.actions[cur], ctx.obs.facing);
    if (!allowed(a)) return Status::Failure;
    out.action = a;
    ++cur;
    return cur >= n.tactic.actions.size() ? Status::Success : Status::Running;
  }

  Status search_leaf(int id, const BtTree::Node& n, bool resume) {
    out.visited_leaves.push_back(id);
    MctsLeafRuntime& lr = rt.leaf[static_cast<std::size_t>(id)];
    if (!resume) lr = {};
    if (!lr.started && out.action) return Status::Running;  // defer the search to next tick
    if (!ctx.state || !ctx.rng)
      throw Error("search leaf '" + n.name + "' needs the game state and a random stream");
    const auto r = bt_mcts_leaf_tick(n.mcts, lr, *ctx.state, ctx.side, *ctx.rng);
    if (r.action) out.action = r.action;
    return r.status;
  }
};

}  // namespace

BtTickResult tick(const BtTree& tree, BtRuntime& rt, const BtContext& ctx) {
  if (rt.running_child.size() != tree.size()) rt = BtRuntime::for_tree(tree);
  BtTickResult out;
  Ticker t{tree, rt, ctx, out};
  out.status = t.eval(0, rt.active);
  if (out.status == Status::Running) rt.active = true;
  else rt.reset();
  return out;
}

Status bt_oracle(const BtNode& n) {
  switch (n.kind) {
    case BtNode::Kind::Selector:
      for (const BtNode& c : n.children)
        if (bt_oracle(c) == Status::Success) return Status::Success;
      return Status::Failure;
    case BtNode::Kind::Sequencer:
      for (const BtNode& c : n.children)
        if (bt_oracle(c) == Status::Failure) return Status::Failure;
      return Status::Success;
    case BtNode::Kind::Condition:
      if (n.condition.op() == Condition::Op::True) return Status::Success;
      if (n.condition.op() == Condition::Op::False) return Status::Failure;
      break;
    default: break;
  }
  throw MalformedTree("bt_oracle: only constant leaves are supported");
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

BtNode node_from_json(const json& j, const CharacterSpec& self, const CharacterSpec& opp) {
  const auto type = j.at("type").get<std::string>();
  const auto name = j.value("name", std::string{});
  auto kids = [&] {
    std::vector<BtNode> out;
    if (j.contains("children"))
      for (const auto& c : j.at("children")) out.push_back(node_from_json(c, self, opp));
    return out;
  };
  if (type == "selector") return BtNode::selector(kids(), name);
  if (type == "sequencer" || type == "sequence") return BtNode::sequencer(kids(), name);
  if (type == "condition") return BtNode::check(Condition::from_json(j.at("when")), name);
  if (type == "action") {
    if (j.contains("tactic")) return BtNode::act(tactic_from_json(j.at("tactic"), self), name);
    const auto id = j.at("action").get<std::string>();
    auto a = parse_action(id, self);
    if (!a) throw ConfigError("unknown action '" + id + "' in behavior tree");
    return BtNode::act(*a, name);
  }
  if (type == "mcts") {
    MctsLeafSpec spec;
    spec.config = MctsConfig::from_json(j.value("config", json::object()), opp);
    for (const auto& p : j.at("pool")) {
      auto a = parse_action(p.get<std::string>(), self);
      if (!a) throw ConfigError("unknown action " + p.dump() + " in search-leaf pool");
      spec.pool.push_back(*a);
    }
    const auto obj = j.value("objective", std::string("offensive"));
    if (obj == "offensive") spec.objective = LeafObjective::Offensive;
    else if (obj == "defensive") spec.objective = LeafObjective::Defensive;
    else throw ConfigError("unknown leaf objective '" + obj + "'");
    return BtNode::search(std::move(spec), name);
  }
  throw ConfigError("unknown behavior tree node type '" + type + "'");
}

}  // namespace

BtTree BtTree::from_json(const json& j, const CharacterSpec& self, const CharacterSpec& opponent) {
  try {
    return BtTree(node_from_json(j.contains("root") ? j.at("root") : j, self, opponent));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed behavior tree: ") + e.what());
  }
}

}  // namespace arena
