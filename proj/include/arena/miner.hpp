#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "arena/fsm.hpp"
#include "arena/match.hpp"

namespace arena {

/// Maps observations to analysis-state labels.
struct StateClassifier {
  std::vector<std::string> labels;  // every label classify can return, in state order
  std::function<std::string(const Observation&)> classify;
  /// Transitions between labels for the mined machine.
  std::vector<Transition> transitions;
};

/// Distance bands close (<10), mid (10..30), far (>30) crossed with health
/// advantage behind (< -10), even (within 10), ahead (> 10). Labels read
/// "<distance>/<health>", e.g. "close/ahead". Transitions connect labels one
/// band apart; health changes outrank distance changes.
StateClassifier default_classifier();

/// One side's decisions in one round.
struct ActionLog {
  std::vector<std::string> labels;
  std::vector<std::string> actions;  // action ids, parallel to labels
};

using NGram = std::vector<std::string>;
using NGramCounts = std::map<std::string, std::map<NGram, std::size_t>>;  // label -> n-gram -> count

/// Decision ticks (the side could act) of every mined side: the human sides,
/// or both sides when no side is human. Training dummies are skipped.
std::vector<ActionLog> extract_logs(const std::vector<Replay>& replays, const StateClassifier& c);

/// Counts n-grams of length 1..max_len over runs of consecutive entries that
/// share a label.
NGramCounts count_ngrams(const std::vector<ActionLog>& logs, int max_len);

/// The `k` most frequent n-grams, ties broken lexicographically.
std::vector<std::pair<NGram, std::size_t>> top_k(const std::map<NGram, std::size_t>& counts, int k);

struct MinedTactics {
  FsmDef fsm;
  NGramCounts counts;
};

/// Builds an FSM skeleton with one state per classifier label whose tactics
/// are that label's top-k n-grams. Labels never observed get [[Idle]].
/// Throws EmptyLog or ConfigError.
MinedTactics mine_logs(const std::vector<ActionLog>& logs, const StateClassifier& c, int max_len,
                       int pool_size, const CharacterSpec& spec);
MinedTactics mine_tactics(const std::vector<Replay>& replays, const StateClassifier& c, int max_len,
                          int pool_size);

}  // namespace arena
