// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "arena/hybrid.hpp"
#include "arena/match.hpp"
#include "support.hpp"

using namespace arena;
using namespace arena::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double limit_s;
  std::function<Outcome()> run;
};

const CharacterSpec kSpec = default_character();

Action act(std::string_view id) { return *parse_action(id, kSpec); }

MctsConfig config(int budget, OpponentModel model = OpponentModel::uniform_random()) {
  MctsConfig c;
  c.iteration_budget = budget;
  c.opponent = std::move(model);
  return c;
}

MatchConfig versus(const json& left, const json& right, std::uint64_t seed) {
  return MatchConfig::from_json(
      json{{"seed", seed}, {"character", "default"}, {"agents", {{"left", left}, {"right", right}}}}, data_dir());
}

/// Win rate of `agent` against uniform random, alternating sides by seed.
double win_rate_vs_random(const json& agent, int matches, std::uint64_t seed_base) {
  int wins = 0;
  for (int i = 0; i < matches; ++i) {
    const bool left = i % 2 == 0;
    const json rnd{{"kind", "random"}};
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
    const Replay r = run_match(left ? versus(agent, rnd, seed) : versus(rnd, agent, seed));
    wins += r.result.winner == (left ? Winner::Left : Winner::Right);
  }
  return static_cast<double>(wins) / matches;
}

bool contains(const std::vector<Action>& pool, Action a, Facing f) {
  return std::any_of(pool.begin(), pool.end(), [&](Action p) { return oriented(p, f) == a; });
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome triad() {
  int ok = 0;
  for (IntentClass l : kAllIntents)
    for (IntentClass r : kAllIntents) ok += resolve_interaction(l, r) == triad_table(l, r);
  return {ok == 25, fmt("%d/25 pairs", ok)};
}

using HfsmMemo = std::map<std::tuple<std::string, std::string, std::string, int>, std::uint64_t>;

// Sequences of exactly `depth` more events, from this product state, that diverge at some prefix.
std::uint64_t disagreements(const HfsmDef& h, const FsmDef& flat, const std::vector<Features>& alphabet,
                            const HfsmPosition& hp, const std::string& fp, int depth, HfsmMemo& memo) {
  std::uint64_t total = 1;
  for (int i = 0; i < depth; ++i) total *= alphabet.size();
  if (hp.super + "/" + hp.child != fp) return total;
  if (depth == 0) return 0;
  const auto key = std::make_tuple(hp.super, hp.child, fp, depth);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t bad = 0;
  for (const Features& e : alphabet)
    bad += disagreements(h, flat, alphabet, hfsm_step(h, hp, e), fsm_step(flat, fp, e).next, depth - 1, memo);
  memo[key] = bad;
  return bad;
}

Outcome turnstile() {
  const FsmDef t = load_fsm("fsm/turnstile.json");
  const std::vector<std::string> events = {"push", "coin", "push", "coin", "coin", "push"};
  const std::vector<std::string> expect = {"Locked", "Unlocked", "Locked", "Unlocked", "Unlocked", "Locked"};
  std::string cur = t.initial();
  bool seq = true;
  for (std::size_t i = 0; i < events.size(); ++i) {
    cur = fsm_step(t, cur, event(events[i])).next;
    seq = seq && cur == expect[i];
  }

  const HfsmDef h = load_hfsm("fsm/turnstile_hfsm.json");
  bool broke = true;
  for (const Superstate& s : h.superstates())
    for (const FsmState& c : s.machine.states())
      broke = broke && hfsm_step(h, {s.id, c.id}, event("break_event")).super == "NonFunctional";

  const FsmDef flat = flatten(h);
  std::vector<Features> alphabet = {Features{}};
  for (const char* e : {"coin", "push", "break_event", "repair"}) alphabet.push_back(event(e));
  HfsmMemo memo;
  std::uint64_t bad = 0, sequences = 0;
  for (int len = 1; len <= 12; ++len) {
    bad += disagreements(h, flat, alphabet, hfsm_initial(h), flat.initial(), len, memo);
    std::uint64_t n = 1;
    for (int i = 0; i < len; ++i) n *= alphabet.size();
    sequences += n;
  }
  return {seq && broke && bad == 0,
          fmt("sequence %s, break_event %s, %llu/%llu sequences of length 1..12 diverge", seq ? "ok" : "wrong",
              broke ? "ok" : "wrong", static_cast<unsigned long long>(bad),
              static_cast<unsigned long long>(sequences))};
}

Outcome bt_agreement() {
  Rng rng(2024);
  int agree = 0, visits = 0;
  for (int i = 0; i < 1000; ++i) {
    const BtNode root = random_constant_tree(rng, 4, 4);
    const BtTree t(root);
    BtRuntime rt = BtRuntime::for_tree(t);
    BtContext ctx;
    ctx.obs.can_act = true;
    const auto r = tick(t, rt, ctx);
    agree += r.status == bt_oracle(root);
    int next = 0;
    std::vector<int> expect;
    Status s{};
    expected_visits(root, next, expect, s);
    visits += r.visited_leaves == expect;
  }
  return {agree == 1000 && visits == 1000, fmt("%d/1000 statuses, %d/1000 visit sequences", agree, visits)};
}

Outcome mcts_convergence() {
  const GameState s = last_exchange_state();
  int grabs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    grabs += plan(s, Side::Left, config(1000, OpponentModel::always_block()), rng).action == Action::grab();
  }
  return {grabs >= 99, fmt("Grab chosen in %d/100 seeds", grabs)};
}

Outcome mcts_strength() {
  const double w = win_rate_vs_random({{"kind", "mcts"}, {"mcts", {{"iterations", 300}}}}, 200, 5000);
  return {w >= 0.80, fmt("win rate %.3f over 200 matches", w)};
}

Outcome difficulty() {
  std::vector<double> rates;
  for (double d : {0.0, 0.25, 0.5, 0.75, 1.0})
    rates.push_back(win_rate_vs_random({{"kind", "input_reading"}, {"difficulty", d}}, 200, 9000));
  bool monotone = true;
  for (std::size_t i = 1; i < rates.size(); ++i) monotone = monotone && rates[i] >= rates[i - 1];
  return {monotone && rates.back() == 1.0,
          fmt("win rates %.3f %.3f %.3f %.3f %.3f", rates[0], rates[1], rates[2], rates[3], rates[4])};
}

Outcome determinism() {
  MatchConfig base = MatchConfig::load(data_dir() / "matches/random_vs_mcts.json");
  int same = 0, verified = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    base.seed = seed;
    const Replay a = run_match(base);
    const Replay b = run_match(base);
    same += a.digest == b.digest;
    verified += verify_replay(a);
  }
  return {same == 50 && verified == 50, fmt("%d/50 digests identical, %d/50 verified", same, verified)};
}

Outcome hybrid() {
  constexpr int kDecisions = 10000;
  const FsmDef pooled = load_fsm("fsm/pooled.json");
  validate_pools(pooled, kSpec);

  // variant A: FSM state pools restrict the root
  int a_decisions = 0, a_outside = 0;
  double a_branching = 0, plain_branching = 0;
  for (std::uint64_t game = 0; a_decisions < kDecisions; ++game) {
    GameState s = fresh_state(game);
    Rng rng(derive_seed({1, game}));
    FsmMctsAgentState st;
    while (!round_result(s) && a_decisions < kDecisions) {
      const HybridDecision d = fsm_mcts_act(pooled, st, s, Side::Left, config(20), rng);
      const FighterState& me = s.fighters[0];
      if (me.can_act() && !d.empty_pool) {
        ++a_decisions;
        a_outside += !contains(pooled.state(d.fsm_state).search_pool(), d.action, me.facing);
        a_branching += static_cast<double>(d.root_branching);
        plain_branching += static_cast<double>(legal_actions(s, Side::Left).size());
      }
      const ActionSet rl = legal_actions(s, Side::Right);
      advance(s, d.action, rl[rng.below(rl.size())]);
    }
  }
  a_branching /= a_decisions;
  plain_branching /= a_decisions;

  // BT+MCTS: search leaves of the shipped tree, budget lowered for speed
  json tree = read_json_file(data_dir() / "bt/mcts_leaf.json");
  for (auto& branch : tree["root"]["children"])
    if (branch.contains("children"))
      for (auto& leaf : branch["children"])
        if (leaf["type"] == "mcts") leaf["config"]["iterations"] = 20;
  const BtTree bt = BtTree::from_json(tree, kSpec, kSpec);
  int b_decisions = 0, b_outside = 0;
  for (std::uint64_t game = 0; b_decisions < kDecisions; ++game) {
    GameState s = fresh_state(game);
    Rng rng(derive_seed({2, game}));
    BtRuntime rt = BtRuntime::for_tree(bt);
    while (!round_result(s) && b_decisions < kDecisions) {
      const ActionSet legal = legal_actions(s, Side::Left);
      BtContext ctx{observe(s, Side::Left), &s, Side::Left, std::span<const Action>(legal.data(), legal.size()), &rng};
      const BtTickResult r = tick(bt, rt, ctx);
      Action mine = Action::idle();
      if (r.action) {
        mine = *r.action;
        const BtTree::Node& leaf = bt.node(r.visited_leaves.back());
        if (leaf.kind == BtNode::Kind::Mcts) {
          ++b_decisions;
          b_outside += !contains(leaf.mcts.pool, mine, s.fighters[0].facing);
        }
      }
      const ActionSet rl = legal_actions(s, Side::Right);
      advance(s, is_legal(s, Side::Left, mine) ? mine : Action::idle(), rl[rng.below(rl.size())]);
    }
  }

  // a pool of every action is plain MCTS
  const FsmDef everything({{"Only", {}, {act("Idle"), act("MoveLeft"), act("MoveRight"), act("Block"), act("Grab"),
                                         act("Attack:Punch"), act("Attack:Heavy"), act("Special:Fireball")}}},
                          {}, "Only");
  int equal = 0, compared = 0;
  for (std::uint64_t game = 0; compared < 500; ++game) {
    GameState s = fresh_state(game);
    Rng driver(derive_seed({3, game}));
    for (int t = 0; !round_result(s) && compared < 500; ++t) {
      const std::uint64_t seed = derive_seed({game, static_cast<std::uint64_t>(t)});
      Rng x(seed), y(seed);
      FsmMctsAgentState st;
      const HybridDecision d = fsm_mcts_act(everything, st, s, Side::Left, config(30), x);
      const PlanResult p = plan(s, Side::Left, config(30), y);
      ++compared;
      equal += d.action == p.action && d.root_branching == p.root_branching;
      const ActionSet rl = legal_actions(s, Side::Right);
      advance(s, d.action, rl[driver.below(rl.size())]);
    }
  }

  const bool pass = a_outside == 0 && b_outside == 0 && a_branching < plain_branching && equal == compared;
  return {pass, fmt("fsm_mcts %d/%d outside pool, bt_mcts %d/%d outside pool, branching %.2f vs %.2f, "
                    "degenerate %d/%d equal",
                    a_outside, a_decisions, b_outside, b_decisions, a_branching, plain_branching, equal, compared)};
}

Outcome miner() {
  int equal = 0, runs = 0;
  bool stable = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto logs = synthetic_logs(seed, 20);
    for (int len = 1; len <= 4; ++len) {
      ++runs;
      const NGramCounts counts = count_ngrams(logs, len);
      equal += counts == brute_force_counts(logs, len);
      for (const auto& [label, grams] : counts) {
        std::vector<std::pair<NGram, std::size_t>> sorted(grams.begin(), grams.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
          return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        sorted.resize(std::min<std::size_t>(sorted.size(), 5));
        stable = stable && top_k(grams, 5) == sorted && top_k(grams, 5) == top_k(grams, 5);
      }
    }
  }
  return {equal == runs && stable,
          fmt("%d/%d count tables equal, top-k %s", equal, runs, stable ? "deterministic" : "unstable")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"triad", 1, triad},
      {"turnstile", 10, turnstile},
      {"bt-oracle", 10, bt_agreement},
      {"mcts-convergence", 30, mcts_convergence},
      {"mcts-strength", 120, mcts_strength},
      {"difficulty-monotonicity", 180, difficulty},
      {"determinism", 120, determinism},
      {"hybrid", 120, hybrid},
      {"miner", 10, miner},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("%s %-24s %s (%.2fs, limit %.0fs)\n", pass ? "PASS" : "FAIL", c.id.c_str(), o.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
