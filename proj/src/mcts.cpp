#include "arena/mcts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "arena/errors.hpp"
#include "arena/fsm.hpp"

namespace arena {

using nlohmann::json;

void MctsConfig::validate() const {
  if (iteration_budget < 1 && !time_budget_ms)
    throw ConfigError("mcts: iteration_budget >= 1 or time_budget_ms required");
  if (time_budget_ms && *time_budget_ms <= 0) throw ConfigError("mcts: time_budget_ms must be > 0");
  if (exploration_c < 0) throw ConfigError("mcts: exploration_c must be >= 0");
  if (rollout_depth < 1) throw ConfigError("mcts: rollout_depth must be >= 1");
  const double sum = weights.health + weights.position + weights.time;
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("mcts: eval_weights must sum to 1");
  if (weights.health < 0 || weights.position < 0 || weights.time < 0)
    throw ConfigError("mcts: eval_weights must be non-negative");
  if (opponent.kind == OpponentModel::Kind::InputReading &&
      (opponent.difficulty < 0 || opponent.difficulty > 1))
    throw ConfigError("mcts: input_reading difficulty must lie in [0,1]");
  if (opponent.kind == OpponentModel::Kind::Scripted && opponent.script.empty())
    throw ConfigError("mcts: scripted opponent needs a non-empty sequence");
}

MctsConfig MctsConfig::from_json(const json& j, const CharacterSpec& opponent_spec) {
  MctsConfig c;
  try {
    c.iteration_budget = j.value("iterations", c.iteration_budget);
    if (j.contains("time_budget_ms") && !j.at("time_budget_ms").is_null())
      c.time_budget_ms = j.at("time_budget_ms").get<double>();
    c.exploration_c = j.value("exploration_c", c.exploration_c);
    c.rollout_depth = j.value("rollout_depth", c.rollout_depth);
    if (j.contains("eval_weights")) {
      const auto& w = j.at("eval_weights");
      c.weights.health = w.value("health", c.weights.health);
      c.weights.position = w.value("position", c.weights.position);
      c.weights.time = w.value("time", c.weights.time);
    }
    if (j.contains("opponent_model")) {
      const auto& m = j.at("opponent_model");
      const auto kind = m.is_string() ? m.get<std::string>() : m.at("kind").get<std::string>();
      if (kind == "uniform_random") {
        c.opponent = OpponentModel::uniform_random();
      } else if (kind == "always_block") {
        c.opponent = OpponentModel::always_block();
      } else if (kind == "input_reading") {
        c.opponent = OpponentModel::input_reading(m.value("difficulty", 1.0));
      } else if (kind == "scripted") {
        std::vector<Action> seq;
        for (const auto& a : m.at("sequence")) {
          auto act = parse_action(a.get<std::string>(), opponent_spec);
          if (!act) throw ConfigError("mcts: unknown scripted action " + a.dump());
          seq.push_back(*act);
        }
        c.opponent = OpponentModel::scripted(std::move(seq));
      } else {
        throw ConfigError("mcts: unknown opponent_model '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed mcts config: ") + e.what());
  }
  c.validate();
  return c;
}

json MctsConfig::to_json(const CharacterSpec& opponent_spec) const {
  json model;
  switch (opponent.kind) {
    case OpponentModel::Kind::UniformRandom: model = {{"kind", "uniform_random"}}; break;
    case OpponentModel::Kind::AlwaysBlock: model = {{"kind", "always_block"}}; break;
    case OpponentModel::Kind::InputReading:
      model = {{"kind", "input_reading"}, {"difficulty", opponent.difficulty}};
      break;
    case OpponentModel::Kind::Scripted: {
      json seq = json::array();
      for (Action a : opponent.script) seq.push_back(action_id(a, opponent_spec));
      model = {{"kind", "scripted"}, {"sequence", seq}};
      break;
    }
  }
  json out{{"iterations", iteration_budget},
           {"exploration_c", exploration_c},
           {"rollout_depth", rollout_depth},
           {"opponent_model", model},
           {"eval_weights",
            {{"health", weights.health}, {"position", weights.position}, {"time", weights.time}}}};
  out["time_budget_ms"] = time_budget_ms ? json(*time_budget_ms) : json(nullptr);
  return out;
}

double ucb1(double child_wins, int child_visits, int parent_visits, double c) {
  if (child_visits <= 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(child_visits);
  return child_wins / n + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

void backpropagate(MctsTree& tree, std::span<const int> path, double payoff) {
  for (int id : path) {
    MctsNode& n = tree.nodes[static_cast<std::size_t>(id)];
    n.visits += 1;
    n.wins += n.planner_to_move ? payoff : 1.0 - payoff;
  }
}

double evaluate(const GameState& s, Side side, const EvalWeights& w) {
  const Ruleset& r = *s.rules;
  const FighterState& me = s.fighter(side);
  const FighterState& opp = s.fighter(other(side));
  const double lead = static_cast<double>(me.health) / s.character(side).max_health -
                      static_cast<double>(opp.health) / s.character(other(side)).max_health;
  const double health = 0.5 + lead / 2.0;
  const double centre = r.stage_length / 2.0;
  const double position =
      0.5 + (std::abs(opp.position - centre) - std::abs(me.position - centre)) / (2.0 * centre);
  const double elapsed = 1.0 - static_cast<double>(s.timer) / r.round_length;
  const double time = 0.5 + lead / 2.0 * elapsed;
  return std::clamp(w.health * health + w.position * position + w.time * time, 0.0, 1.0);
}

Action opponent_action(const OpponentModel& model, const GameState& s, Side opp, Action planner_action,
                       Rng& rng) {
  switch (model.kind) {
    case OpponentModel::Kind::UniformRandom: {
      const ActionSet legal = legal_actions(s, opp);
      return legal[rng.below(legal.size())];
    }
    case OpponentModel::Kind::AlwaysBlock:
      return s.fighter(opp).can_act() ? Action::block() : Action::idle();
    case OpponentModel::Kind::InputReading:
      return input_reading_act(s, opp, planner_action, model.difficulty, rng);
    case OpponentModel::Kind::Scripted: {
      const Action a = model.script[static_cast<std::size_t>(s.tick) % model.script.size()];
      return is_legal(s, opp, a) ? a : Action::idle();
    }
  }
  return Action::idle();
}

namespace {

double terminal_payoff(const RoundResult& r, Side side) {
  if (r.winner == Winner::Draw) return 0.5;
  return (r.winner == Winner::Left) == (side == Side::Left) ? 1.0 : 0.0;
}

void advance_sides(GameState& s, Side side, Action mine, Action theirs) {
  if (side == Side::Left) advance(s, mine, theirs);
  else advance(s, theirs, mine);
}

double rollout_in_place(GameState& s, Side side, const MctsConfig& cfg, Rng& rng) {
  const Side opp = other(side);
  for (int d = 0; d < cfg.rollout_depth; ++d) {
    if (auto r = round_result(s)) return terminal_payoff(*r, side);
    const ActionSet legal = legal_actions(s, side);
    const Action mine = legal[rng.below(legal.size())];
    const Action theirs = opponent_action(cfg.opponent, s, opp, mine, rng);
    advance_sides(s, side, mine, theirs);
  }
  if (auto r = round_result(s)) return terminal_payoff(*r, side);
  return evaluate(s, side, cfg.weights);
}

}  // namespace

double simulate(const GameState& state, Side side, const MctsConfig& cfg, Rng& rng) {
  GameState s = state;
  return rollout_in_place(s, side, cfg, rng);
}

PlanResult plan(const GameState& state, Side side, const MctsConfig& cfg, Rng& rng,
                std::span<const Action> root_actions, MctsTree* tree_out) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  if (round_result(state)) throw TerminalState("plan: round already decided");

  ActionSet allowed;
  for (Action a : legal_actions(state, side))
    if (root_actions.empty() || std::find(root_actions.begin(), root_actions.end(), a) != root_actions.end())
      allowed.push_back(a);
  if (allowed.empty()) throw NoLegalActions("plan: no legal action for the planning side");

  const Side opp = other(side);
  const CharacterSpec& spec = state.character(side);
  MctsTree local;
  MctsTree& tree = tree_out ? *tree_out : local;
  tree.nodes.clear();
  tree.nodes.reserve(static_cast<std::size_t>(std::max(cfg.iteration_budget, 64)) * 2 + 1);
  {
    MctsNode root;
    root.state = state;
    root.untried = allowed;
    tree.nodes.push_back(std::move(root));
  }

  auto add_planner_child = [&](int parent, Action theirs) -> int {
    const int grand = tree.nodes[static_cast<std::size_t>(parent)].parent;
    const Action mine = *tree.nodes[static_cast<std::size_t>(parent)].action_from_parent;
    MctsNode child;
    child.action_from_parent = theirs;
    child.parent = parent;
    child.state = tree.nodes[static_cast<std::size_t>(grand)].state;
    advance_sides(child.state, side, mine, theirs);
    child.terminal = round_result(child.state).has_value();
    if (!child.terminal) child.untried = legal_actions(child.state, side);
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(child));
    tree.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  };

  auto leaf_payoff = [&](int id) {
    MctsNode& n = tree.nodes[static_cast<std::size_t>(id)];
    if (n.terminal) return terminal_payoff(*round_result(n.state), side);
    return simulate(n.state, side, cfg, rng);
  };

  std::vector<int> path;
  int iterations = 0;
  const bool timed = cfg.time_budget_ms.has_value();
  while (true) {
    if (cfg.iteration_budget > 0 && iterations >= cfg.iteration_budget) break;
    if (timed && iterations > 0) {
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      if (ms >= *cfg.time_budget_ms) break;
    }
    path.clear();
    int node = 0;
    path.push_back(node);
    double payoff = 0.5;
    while (true) {
      MctsNode& n = tree.nodes[static_cast<std::size_t>(node)];
      if (n.planner_to_move) {
        if (n.terminal) {
          payoff = terminal_payoff(*round_result(n.state), side);
          break;
        }
        if (!n.untried.empty()) {
          // expansion: planner action, then the opponent's reply
          const std::size_t k = rng.below(n.untried.size());
          const Action mine = n.untried[k];
          n.untried.erase(n.untried.begin() + static_cast<std::ptrdiff_t>(k));
          const Action theirs = opponent_action(cfg.opponent, n.state, opp, mine, rng);
          MctsNode reply;
          reply.action_from_parent = mine;
          reply.planner_to_move = false;
          reply.parent = node;
          const int rid = static_cast<int>(tree.nodes.size());
          tree.nodes.push_back(std::move(reply));
          tree.nodes[static_cast<std::size_t>(node)].children.push_back(rid);
          path.push_back(rid);
          const int leaf = add_planner_child(rid, theirs);
          path.push_back(leaf);
          payoff = leaf_payoff(leaf);
          break;
        }
        // selection
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c : n.children) {
          const MctsNode& ch = tree.nodes[static_cast<std::size_t>(c)];
          // opponent-to-move children store the opponent's share
          const double score = ucb1(ch.visits - ch.wins, ch.visits, n.visits, cfg.exploration_c);
          if (score > best_score) {
            best_score = score;
            best = c;
          }
        }
        node = best;
        path.push_back(node);
        continue;
      }
      const MctsNode& parent = tree.nodes[static_cast<std::size_t>(n.parent)];
      const Action theirs = opponent_action(cfg.opponent, parent.state, opp, *n.action_from_parent, rng);
      int next = -1;
      for (int c : n.children)
        if (*tree.nodes[static_cast<std::size_t>(c)].action_from_parent == theirs) next = c;
      if (next >= 0) {
        node = next;
        path.push_back(node);
        continue;
      }
      const int leaf = add_planner_child(node, theirs);
      path.push_back(leaf);
      payoff = leaf_payoff(leaf);
      break;
    }
    std::reverse(path.begin(), path.end());
    backpropagate(tree, path, payoff);
    ++iterations;
  }

  PlanResult out;
  out.iterations = iterations;
  out.root_branching = allowed.size();
  const MctsNode& root = tree.nodes.front();
  const RootChildStat* best = nullptr;
  std::string best_id;
  for (int c : root.children) {
    const MctsNode& ch = tree.nodes[static_cast<std::size_t>(c)];
    RootChildStat st{*ch.action_from_parent, ch.visits,
                     ch.visits ? (ch.visits - ch.wins) / ch.visits : 0.0};
    out.children.push_back(st);
  }
  for (const RootChildStat& st : out.children) {
    const std::string id = action_id(st.action, spec);
    if (!best || st.visits > best->visits || (st.visits == best->visits && id < best_id)) {
      best = &st;
      best_id = id;
    }
  }
  out.action = best ? best->action : allowed.front();
  out.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return out;
}

}  // namespace arena
