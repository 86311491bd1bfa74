#include "arena/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "arena/errors.hpp"
#include "arena/io.hpp"

namespace arena {

using nlohmann::json;

Roster Roster::from_json(const json& raw, const std::filesystem::path& base) {
  const json j = resolve_file_refs(raw, base);
  Roster r;
  try {
    const CharacterSpec c = j.contains("character") ? character_from_json(j.at("character")) : default_character();
    r.rules = rules_from_json(j.value("rules", json::object()), c, c);
    std::set<std::string> names;
    for (const auto& a : j.at("agents")) {
      r.agents.push_back(AgentSpec::from_json(a));
      if (!names.insert(r.agents.back().display_name()).second)
        throw ConfigError("duplicate roster name '" + r.agents.back().display_name() + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed roster: ") + e.what());
  }
  if (r.agents.size() < 2) throw ConfigError("a roster needs at least two agents");
  return r;
}

Roster Roster::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path), path.parent_path());
}

std::uint64_t match_seed(std::uint64_t master, std::size_t pair, int game, int side_swap) {
  return derive_seed({master, pair, static_cast<std::uint64_t>(game), static_cast<std::uint64_t>(side_swap)});
}

Standings run_tournament(const Roster& roster, int games_per_pair, std::uint64_t master_seed, unsigned workers) {
  if (roster.agents.size() < 2) throw ConfigError("a roster needs at least two agents");
  if (games_per_pair < 1) throw ConfigError("games_per_pair must be >= 1");
  const std::size_t n = roster.agents.size();

  struct Job {
    std::size_t pair;
    MatchConfig cfg;
  };
  struct Outcome {
    Winner winner = Winner::Draw;
    std::array<DecisionStats, 2> stats;
  };
  std::vector<Job> jobs;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t pair = pairs.size();
      pairs.emplace_back(i, j);
      for (int g = 0; g < games_per_pair; ++g)
        for (int swap = 0; swap < 2; ++swap) {
          MatchConfig cfg;
          cfg.rules = roster.rules;
          const AgentSpec& a = roster.agents[i];
          const AgentSpec& b = roster.agents[j];
          cfg.agents = swap ? std::array{b, a} : std::array{a, b};
          cfg.seed = match_seed(master_seed, pair, g, swap);
          jobs.push_back({pair, std::move(cfg)});
        }
    }

  std::vector<Outcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        const Replay r = run_match(jobs[k].cfg);
        outcomes[k] = {r.result.winner, r.stats};
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::map<std::string, Standing> table;
  std::map<std::string, double> latency_ms;
  std::map<std::string, std::size_t> decisions;
  for (const AgentSpec& a : roster.agents) table[a.display_name()].name = a.display_name();
  Standings out;
  for (const auto& [i, j] : pairs)
    out.pairs.push_back({roster.agents[i].display_name(), roster.agents[j].display_name()});
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Job& job = jobs[k];
    const Outcome& o = outcomes[k];
    ++out.matches;
    const std::array<std::string, 2> names{job.cfg.agents[0].display_name(), job.cfg.agents[1].display_name()};
    for (int s = 0; s < 2; ++s) {
      Standing& st = table[names[static_cast<std::size_t>(s)]];
      ++st.matches;
      latency_ms[st.name] += o.stats[static_cast<std::size_t>(s)].total_ms;
      decisions[st.name] += o.stats[static_cast<std::size_t>(s)].decisions;
      if (o.winner == Winner::Draw) ++st.draws;
      else if (static_cast<int>(o.winner) == s) ++st.wins;
      else ++st.losses;
    }
    PairRecord& rec = out.pairs[job.pair];
    if (o.winner == Winner::Draw) ++rec.draws;
    else if (names[o.winner == Winner::Left ? 0 : 1] == rec.a) ++rec.a_wins;
    else ++rec.b_wins;
  }
  for (auto& [name, st] : table) {
    st.mean_decision_ms = decisions[name] ? latency_ms[name] / static_cast<double>(decisions[name]) : 0.0;
    out.table.push_back(st);
  }
  std::sort(out.table.begin(), out.table.end(), [](const Standing& x, const Standing& y) {
    if (x.win_rate() != y.win_rate()) return x.win_rate() > y.win_rate();
    return x.name < y.name;
  });
  return out;
}

json Standings::to_json() const {
  json t = json::array();
  for (const Standing& s : table)
    t.push_back({{"name", s.name},
                 {"wins", s.wins},
                 {"losses", s.losses},
                 {"draws", s.draws},
                 {"matches", s.matches},
                 {"win_rate", s.win_rate()},
                 {"mean_decision_ms", s.mean_decision_ms}});
  json p = json::array();
  for (const PairRecord& r : pairs)
    p.push_back({{"a", r.a}, {"b", r.b}, {"a_wins", r.a_wins}, {"b_wins", r.b_wins}, {"draws", r.draws}});
  return json{{"standings", t}, {"pairs", p}, {"matches", matches}};
}

std::string Standings::to_table() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-4s %-24s %6s %6s %6s %8s %12s\n", "#", "agent", "W", "L", "D", "win%",
                "ms/decision");
  out += buf;
  int rank = 1;
  for (const Standing& s : table) {
    std::snprintf(buf, sizeof buf, "%-4d %-24s %6d %6d %6d %7.1f%% %12.3f\n", rank++, s.name.c_str(), s.wins,
                  s.losses, s.draws, 100.0 * s.win_rate(), s.mean_decision_ms);
    out += buf;
  }
  return out;
}

}  // namespace arena
