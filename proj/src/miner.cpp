#include "arena/miner.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "arena/errors.hpp"

namespace arena {

namespace {

constexpr std::array<std::string_view, 3> kDistance = {"close", "mid", "far"};
constexpr std::array<std::string_view, 3> kHealth = {"behind", "even", "ahead"};

int distance_band(int d) { return d < 10 ? 0 : (d <= 30 ? 1 : 2); }
int health_band(int adv) { return adv < -10 ? 0 : (adv <= 10 ? 1 : 2); }

Condition distance_is(int band) {
  switch (band) {
    case 0: return Condition::compare("distance", Condition::Op::Lt, 10);
    case 1:
      return Condition::all({Condition::compare("distance", Condition::Op::Ge, 10),
                             Condition::compare("distance", Condition::Op::Le, 30)});
    default: return Condition::compare("distance", Condition::Op::Gt, 30);
  }
}

Condition health_is(int band) {
  switch (band) {
    case 0: return Condition::compare("health_advantage", Condition::Op::Lt, -10);
    case 1:
      return Condition::all({Condition::compare("health_advantage", Condition::Op::Ge, -10),
                             Condition::compare("health_advantage", Condition::Op::Le, 10)});
    default: return Condition::compare("health_advantage", Condition::Op::Gt, 10);
  }
}

std::string label(int d, int h) { return std::string(kDistance[d]) + "/" + std::string(kHealth[h]); }

}  // namespace

StateClassifier default_classifier() {
  StateClassifier c;
  for (int d = 0; d < 3; ++d)
    for (int h = 0; h < 3; ++h) c.labels.push_back(label(d, h));
  c.classify = [](const Observation& o) {
    return label(distance_band(o.distance), health_band(o.own_health - o.opponent_health));
  };
  for (int d = 0; d < 3; ++d)
    for (int h = 0; h < 3; ++h) {
      for (int dh : {-1, 1}) {
        const int h2 = h + dh;
        if (h2 >= 0 && h2 < 3) c.transitions.push_back({label(d, h), label(d, h2), health_is(h2), 2});
      }
      for (int dd : {-1, 1}) {
        const int d2 = d + dd;
        if (d2 >= 0 && d2 < 3) c.transitions.push_back({label(d, h), label(d2, h), distance_is(d2), 1});
      }
    }
  return c;
}

std::vector<ActionLog> extract_logs(const std::vector<Replay>& replays, const StateClassifier& c) {
  std::vector<ActionLog> logs;
  for (const Replay& r : replays) {
    std::array<bool, 2> mined{};
    for (int s = 0; s < 2; ++s) {
      const AgentSpec& a = r.config.agents[s];
      mined[s] = a.kind == AgentKind::Human && !a.params.value("dummy", false);
    }
    if (!mined[0] && !mined[1]) mined = {true, true};
    const std::vector<GameState> states = replay_states(r);
    for (int s = 0; s < 2; ++s) {
      if (!mined[s]) continue;
      const Side side = static_cast<Side>(s);
      const CharacterSpec& spec = r.config.rules.characters[s];
      ActionLog log;
      int round = 0;
      for (std::size_t t = 0; t < r.actions.size(); ++t) {
        const GameState& st = states[t];
        if (st.rounds_played != round) {
          if (!log.actions.empty()) logs.push_back(std::move(log));
          log = {};
          round = st.rounds_played;
        }
        const Observation obs = observe(st, side);
        if (!obs.can_act) continue;
        log.labels.push_back(c.classify(obs));
        log.actions.push_back(action_id(oriented(r.actions[t][s], obs.facing), spec));
      }
      if (!log.actions.empty()) logs.push_back(std::move(log));
    }
  }
  return logs;
}

NGramCounts count_ngrams(const std::vector<ActionLog>& logs, int max_len) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  NGramCounts counts;
  for (const ActionLog& log : logs) {
    if (log.labels.size() != log.actions.size()) throw ConfigError("log labels and actions differ in length");
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < log.actions.size(); ++i) {
      if (log.labels[i] != log.labels[run_start]) run_start = i;
      // every n-gram ending at i that stays within the current run
      auto& bucket = counts[log.labels[i]];
      const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(max_len), i - run_start + 1);
      for (std::size_t n = 1; n <= longest; ++n)
        ++bucket[NGram(log.actions.begin() + static_cast<std::ptrdiff_t>(i + 1 - n),
                       log.actions.begin() + static_cast<std::ptrdiff_t>(i + 1))];
    }
  }
  return counts;
}

std::vector<std::pair<NGram, std::size_t>> top_k(const std::map<NGram, std::size_t>& counts, int k) {
  std::vector<std::pair<NGram, std::size_t>> all(counts.begin(), counts.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (k >= 0 && all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

MinedTactics mine_logs(const std::vector<ActionLog>& logs, const StateClassifier& c, int max_len, int pool_size,
                       const CharacterSpec& spec) {
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  std::size_t entries = 0;
  for (const ActionLog& l : logs) entries += l.actions.size();
  if (entries == 0) throw EmptyLog("no decisions to mine");

  MinedTactics out;
  out.counts = count_ngrams(logs, max_len);
  std::vector<std::string> labels = c.labels;
  for (const auto& [label, _] : out.counts)
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);

  std::vector<FsmState> states;
  for (const std::string& label : labels) {
    FsmState s{label, {}, {}};
    if (auto it = out.counts.find(label); it != out.counts.end())
      for (const auto& [gram, n] : top_k(it->second, pool_size)) {
        Tactic t;
        for (std::size_t i = 0; i < gram.size(); ++i) {
          auto a = parse_action(gram[i], spec);
          if (!a) throw ConfigError("mined action '" + gram[i] + "' is unknown to '" + spec.name + "'");
          t.actions.push_back(*a);
          t.name += (i ? "," : "") + gram[i];
        }
        t.weight = static_cast<double>(n);
        s.tactics.push_back(std::move(t));
      }
    if (s.tactics.empty()) {
      Tactic idle;
      idle.name = "Idle";
      idle.actions = {Action::idle()};
      s.tactics.push_back(std::move(idle));
    }
    states.push_back(std::move(s));
  }
  std::vector<Transition> transitions;
  for (const Transition& t : c.transitions)
    if (std::find(labels.begin(), labels.end(), t.from) != labels.end() &&
        std::find(labels.begin(), labels.end(), t.to) != labels.end())
      transitions.push_back(t);
  // start where the most decisions were made
  std::string initial = labels.front();
  std::size_t best = 0;
  for (const auto& [label, grams] : out.counts) {
    std::size_t singles = 0;
    for (const auto& [g, n] : grams)
      if (g.size() == 1) singles += n;
    if (singles > best) {
      best = singles;
      initial = label;
    }
  }
  out.fsm = FsmDef(std::move(states), std::move(transitions), initial, TacticSelection::Weighted);
  return out;
}

MinedTactics mine_tactics(const std::vector<Replay>& replays, const StateClassifier& c, int max_len,
                          int pool_size) {
  if (replays.empty()) throw EmptyLog("no replays to mine");
  return mine_logs(extract_logs(replays, c), c, max_len, pool_size, replays.front().config.rules.characters[0]);
}

}  // namespace arena
