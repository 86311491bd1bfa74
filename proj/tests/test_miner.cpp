#include <doctest.h>

#include "arena/errors.hpp"
#include "arena/miner.hpp"
#include "support.hpp"

using namespace arena;
using arena::testing::brute_force_counts;
using arena::testing::synthetic_logs;
using nlohmann::json;

namespace {

const CharacterSpec kSpec = default_character();

StateClassifier two_labels() {
  StateClassifier c;
  c.labels = {"X", "Y"};
  c.classify = [](const Observation& o) { return o.distance < 10 ? "X" : "Y"; };
  return c;
}

std::vector<std::string> tactic_ids(const Tactic& t) {
  std::vector<std::string> out;
  for (Action a : t.actions) out.push_back(action_id(a, kSpec));
  return out;
}

}  // namespace

TEST_SUITE("counting") {
  TEST_CASE("counts match exhaustive enumeration") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto logs = synthetic_logs(seed, 20);
      for (int len : {1, 2, 3, 5}) CHECK(count_ngrams(logs, len) == brute_force_counts(logs, len));
    }
  }

  TEST_CASE("n-grams never straddle a label change") {
    const ActionLog log{{"X", "X", "Y", "Y"}, {"Grab", "Block", "Grab", "Block"}};
    const NGramCounts c = count_ngrams({log}, 3);
    CHECK(c.at("X").at({"Grab", "Block"}) == 1);
    CHECK(c.at("Y").at({"Grab", "Block"}) == 1);
    CHECK(c.at("X").count({"Grab", "Block", "Grab"}) == 0);
    CHECK(c.at("X").size() == 3);
  }

  TEST_CASE("top-k orders by count, then lexicographically") {
    const std::map<NGram, std::size_t> counts = {
        {{"Block"}, 4}, {{"Grab"}, 4}, {{"Attack:Punch"}, 4}, {{"Idle"}, 9}, {{"MoveLeft"}, 1}};
    const auto top = top_k(counts, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].first == NGram{"Idle"});
    CHECK(top[1].first == NGram{"Attack:Punch"});
    CHECK(top[2].first == NGram{"Block"});
    CHECK(top_k(counts, 10).size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(top_k(counts, 4) == top_k(counts, 4));
  }

  TEST_CASE("invalid input") {
    CHECK_THROWS_AS(count_ngrams({}, 0), ConfigError);
    const ActionLog ragged{{"X"}, {"Grab", "Block"}};
    CHECK_THROWS_AS(count_ngrams({ragged}, 2), ConfigError);
  }
}

TEST_SUITE("mining") {
  TEST_CASE("a lone action becomes the only tactic") {
    const ActionLog log{{"X", "X", "X"}, {"Grab", "Grab", "Grab"}};
    const MinedTactics m = mine_logs({log}, two_labels(), 1, 5, kSpec);
    const FsmState& x = m.fsm.state(m.fsm.index_of("X"));
    REQUIRE(x.tactics.size() == 1);
    CHECK(tactic_ids(x.tactics[0]) == std::vector<std::string>{"Grab"});
    const FsmState& y = m.fsm.state(m.fsm.index_of("Y"));
    REQUIRE(y.tactics.size() == 1);
    CHECK(tactic_ids(y.tactics[0]) == std::vector<std::string>{"Idle"});
    CHECK(m.fsm.initial() == "X");
  }

  TEST_CASE("k = 1, L = 1 keeps the most frequent action") {
    const auto logs = synthetic_logs(11, 20);
    const MinedTactics m = mine_logs(logs, default_classifier(), 1, 1, kSpec);
    const NGramCounts brute = brute_force_counts(logs, 1);
    for (const auto& [label, grams] : brute) {
      std::size_t best = 0;
      NGram best_gram;
      for (const auto& [g, n] : grams)
        if (n > best) {
          best = n;
          best_gram = g;
        }
      const FsmState& s = m.fsm.state(m.fsm.index_of(label));
      REQUIRE(s.tactics.size() == 1);
      CHECK(tactic_ids(s.tactics[0]) == best_gram);
    }
  }

  TEST_CASE("empty logs") {
    CHECK_THROWS_AS(mine_logs({}, two_labels(), 3, 5, kSpec), EmptyLog);
    CHECK_THROWS_AS(mine_logs({ActionLog{}}, two_labels(), 3, 5, kSpec), EmptyLog);
    CHECK_THROWS_AS(mine_tactics({}, default_classifier(), 3, 5), EmptyLog);
  }

  TEST_CASE("default classifier bands") {
    const StateClassifier c = default_classifier();
    CHECK(c.labels.size() == 9);
    Observation o;
    o.distance = 9;
    o.own_health = 50;
    o.opponent_health = 61;
    CHECK(c.classify(o) == "close/behind");
    o.distance = 30;
    o.opponent_health = 60;
    CHECK(c.classify(o) == "mid/even");
    o.distance = 31;
    o.opponent_health = 39;
    CHECK(c.classify(o) == "far/ahead");
  }

  TEST_CASE("mined machines come from replays and run") {
    std::vector<Replay> replays;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const json j{{"seed", seed},
                   {"character", "default"},
                   {"agents", {{"left", {{"kind", "fsm"}, {"fsm_file", "fsm/enemy.json"}}}, {"right", {{"kind", "random"}}}}}};
      replays.push_back(run_match(MatchConfig::from_json(j, data_dir())));
    }
    const MinedTactics m = mine_tactics(replays, default_classifier(), 3, 5);
    CHECK(m.fsm.states().size() >= 9);
    for (const FsmState& s : m.fsm.states()) {
      CHECK_FALSE(s.tactics.empty());
      CHECK(s.tactics.size() <= 5);
      for (const Tactic& t : s.tactics) CHECK(t.actions.size() <= 3);
    }
    const FsmDef back = FsmDef::from_json(m.fsm.to_json(kSpec), kSpec);
    CHECK(back.states().size() == m.fsm.states().size());
    const json agent{{"kind", "fsm"}, {"fsm", m.fsm.to_json(kSpec)}};
    const json j{{"seed", 1}, {"character", "default"}, {"agents", {{"left", agent}, {"right", {{"kind", "random"}}}}}};
    CHECK(verify_replay(run_match(MatchConfig::from_json(j))));
  }

  TEST_CASE("logs are recorded facing right") {
    const json j{{"seed", 4},
                 {"character", "default"},
                 {"max_ticks", 5},
                 {"agents", {{"left", {{"kind", "fsm"}, {"fsm_file", "fsm/enemy.json"}}}, {"right", {{"kind", "fsm"}, {"fsm_file", "fsm/enemy.json"}}}}}};
    const Replay r = run_match(MatchConfig::from_json(j, data_dir()));
    CHECK(r.actions[0][0] == Action::move_right());
    CHECK(r.actions[0][1] == Action::move_left());
    const auto logs = extract_logs({r}, default_classifier());
    REQUIRE(logs.size() == 2);
    CHECK(logs[0].actions[0] == "MoveRight");
    CHECK(logs[1].actions[0] == "MoveRight");
  }
}
