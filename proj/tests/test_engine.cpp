#include <doctest.h>

#include <map>
#include <vector>

#include "arena/errors.hpp"
#include "support.hpp"

using namespace arena;
using arena::testing::default_rules;
using arena::testing::fresh_state;
using arena::testing::mirrored;
using arena::testing::triad_table;

namespace {

constexpr std::uint8_t kPunch = 0;
constexpr std::uint8_t kHeavy = 1;
constexpr std::uint8_t kFireball = 3;

GameState attacker_active_state() {
  GameState s = fresh_state();
  s.fighters[0].position = 45;
  s.fighters[1].position = 50;
  s.fighters[0].phase = Phase::Active;
  s.fighters[0].phase_timer = 2;
  s.fighters[0].current_move = kPunch;
  return s;
}

std::vector<InputEvent> history(std::initializer_list<std::pair<int, InputToken>> evs) {
  std::vector<InputEvent> h;
  for (auto [t, tok] : evs) h.push_back({t, tok});
  return h;
}

// Tries every choice of history indices for the pattern tokens.
bool brute_force_match(const std::vector<InputEvent>& h, const std::vector<InputToken>& p, int max_gap,
                       std::size_t from = 0, std::size_t j = 0, int prev_tick = 0) {
  if (j == p.size()) return true;
  for (std::size_t i = from; i < h.size(); ++i) {
    if (h[i].token != p[j]) continue;
    if (j > 0 && (h[i].tick <= prev_tick || h[i].tick - prev_tick > max_gap)) continue;
    if (brute_force_match(h, p, max_gap, i + 1, j + 1, h[i].tick)) return true;
  }
  return false;
}

Action random_legal(const GameState& s, Side side, Rng& rng) {
  const ActionSet legal = legal_actions(s, side);
  if (rng.below(8) == 0) {
    static constexpr Motion motions[] = {Motion::Down, Motion::DownFwd, Motion::FwdAtk};
    return Action::idle(motions[rng.below(3)]);
  }
  return legal[rng.below(legal.size())];
}

}  // namespace

TEST_SUITE("triad") {
  TEST_CASE("all 25 pairs match the triad table") {
    for (IntentClass l : kAllIntents)
      for (IntentClass r : kAllIntents) {
        CAPTURE(to_string(l));
        CAPTURE(to_string(r));
        CHECK(resolve_interaction(l, r) == triad_table(l, r));
        CHECK(resolve_interaction(r, l) == mirrored(resolve_interaction(l, r)));
      }
  }

  TEST_CASE("named outcomes") {
    CHECK(resolve_interaction(IntentClass::Attack, IntentClass::Grab) == InteractionOutcome::LeftWins);
    CHECK(resolve_interaction(IntentClass::Grab, IntentClass::Block) == InteractionOutcome::LeftWins);
    CHECK(resolve_interaction(IntentClass::Block, IntentClass::Attack) == InteractionOutcome::LeftWins);
    CHECK(resolve_interaction(IntentClass::Block, IntentClass::Block) == InteractionOutcome::Neutral);
    CHECK(resolve_interaction(IntentClass::Attack, IntentClass::Attack) == InteractionOutcome::Trade);
    CHECK(resolve_interaction(IntentClass::Grab, IntentClass::Grab) == InteractionOutcome::Neutral);
  }
}

TEST_SUITE("step") {
  TEST_CASE("active attack in range against an idle opponent") {
    const GameState s = attacker_active_state();
    const GameState n = step(s, Action::idle(), Action::idle());
    CHECK(n.fighters[1].health == 90);
    CHECK(n.fighters[1].phase == Phase::Hitstun);
    CHECK(n.fighters[1].phase_timer == 6);
    CHECK(n.fighters[0].damage_dealt == 10);
    CHECK(n.fighters[1].combo_hits_taken == 1);
    CHECK(n.fighters[0].events.hit_landed);
    CHECK(n.fighters[1].events.took_hit);
  }

  TEST_CASE("both idle changes only the clock") {
    const GameState s = fresh_state();
    const GameState n = step(s, Action::idle(), Action::idle());
    CHECK(n.tick == s.tick + 1);
    CHECK(n.timer == s.timer - 1);
    GameState expect = s;
    expect.tick = n.tick;
    expect.timer = n.timer;
    CHECK(n == expect);
  }

  TEST_CASE("hits on a stunned fighter cannot be blocked and extend the combo") {
    GameState s = attacker_active_state();
    s.fighters[1].phase = Phase::Hitstun;
    s.fighters[1].phase_timer = 4;
    s.fighters[1].combo_hits_taken = 1;
    CHECK_FALSE(is_legal(s, Side::Right, Action::block()));
    CHECK_THROWS_AS(step(s, Action::idle(), Action::block()), IllegalAction);
    const GameState n = step(s, Action::idle(), Action::idle());
    CHECK(n.fighters[1].health == 90);
    CHECK(n.fighters[1].combo_hits_taken == 2);
    CHECK(n.fighters[1].phase == Phase::Hitstun);
  }

  TEST_CASE("a held block stops the attack without chip damage") {
    GameState s = attacker_active_state();
    const GameState n = step(s, Action::idle(), Action::block());
    CHECK(n.fighters[1].health == 100);
    CHECK(n.fighters[1].phase == Phase::Blockstun);
    CHECK(n.fighters[1].phase_timer == 3);
    CHECK(n.fighters[0].events.hit_blocked);
    CHECK(n.fighters[1].events.blocked_hit);
  }

  TEST_CASE("a punch started at tick t is active at t + startup") {
    GameState s = fresh_state();
    s.fighters[1].position = 48;
    advance(s, Action::attack(kPunch), Action::idle());
    CHECK(s.fighters[0].phase == Phase::Startup);
    advance(s, Action::idle(), Action::idle());
    advance(s, Action::idle(), Action::idle());
    CHECK(s.fighters[1].health == 100);
    advance(s, Action::idle(), Action::idle());
    CHECK(s.fighters[0].phase == Phase::Active);
    CHECK(s.fighters[1].health == 90);
  }

  TEST_CASE("grab beats a held block") {
    GameState s = fresh_state();
    s.fighters[0].position = 48;
    s.fighters[1].position = 52;
    advance(s, Action::grab(), Action::block());
    advance(s, Action::idle(), Action::block());
    advance(s, Action::idle(), Action::block());
    CHECK(s.fighters[1].health == 88);
    CHECK(s.fighters[1].phase == Phase::Hitstun);
  }

  TEST_CASE("mutual attacks in range trade") {
    GameState s = fresh_state();
    s.fighters[0].position = 45;
    s.fighters[1].position = 50;
    for (int i = 0; i < 4; ++i)
      advance(s, i == 0 ? Action::attack(kPunch) : Action::idle(), i == 0 ? Action::attack(kPunch) : Action::idle());
    CHECK(s.fighters[0].health == 90);
    CHECK(s.fighters[1].health == 90);
  }

  TEST_CASE("fireball pattern, projectile and hit") {
    GameState s = fresh_state();
    advance(s, Action::idle(Motion::Down), Action::idle());
    advance(s, Action::idle(Motion::DownFwd), Action::idle());
    CHECK_FALSE(is_legal(s, Side::Left, Action::special(kFireball)));
    advance(s, Action::idle(Motion::FwdAtk), Action::idle());
    CHECK(is_legal(s, Side::Left, Action::special(kFireball)));
    advance(s, Action::special(kFireball), Action::idle());
    CHECK(s.fighters[0].input_history.empty());
    int guard = 0;
    while (s.fighters[1].health == 100 && guard++ < 30) advance(s, Action::idle(), Action::idle());
    CHECK(s.fighters[1].health == 85);
    CHECK(s.projectiles.empty());
  }

  TEST_CASE("errors") {
    GameState s = fresh_state();
    CHECK_THROWS_AS(advance(s, Action::special(kFireball), Action::idle()), IllegalAction);
    s.fighters[1].health = 0;
    CHECK_THROWS_AS(advance(s, Action::idle(), Action::idle()), RoundOver);
  }
}

TEST_SUITE("observe") {
  TEST_CASE("distance and flags") {
    GameState s = fresh_state();
    s.fighters[0].position = 20;
    s.fighters[1].position = 50;
    Observation o = observe(s, Side::Left);
    CHECK(o.distance == 30);
    CHECK(observe(s, Side::Right).distance == 30);
    CHECK_FALSE(o.opponent_attacking);
    CHECK_FALSE(o.projectile_on_screen);
    s.fighters[1].phase = Phase::Startup;
    s.fighters[1].phase_timer = 2;
    s.fighters[1].current_move = kHeavy;
    CHECK(observe(s, Side::Left).opponent_attacking);
    s.projectiles.push_back(Projectile{Side::Right, 40, -4, 15, 8, 4});
    CHECK(observe(s, Side::Left).projectile_on_screen);
  }

  TEST_CASE("against_wall follows wall_epsilon") {
    GameState s = fresh_state();
    for (int p : {0, 1, 2, 3, 50}) {
      s.fighters[0].position = p;
      s.fighters[1].position = 60;
      CHECK(observe(s, Side::Left).against_wall == (p <= 2));
    }
    s.fighters[1].position = 98;
    CHECK(observe(s, Side::Right).against_wall);
    s.fighters[1].position = 97;
    CHECK_FALSE(observe(s, Side::Right).against_wall);
  }
}

TEST_SUITE("legal_actions") {
  TEST_CASE("stunned fighters may only idle") {
    GameState s = fresh_state();
    s.fighters[0].phase = Phase::Hitstun;
    s.fighters[0].phase_timer = 3;
    const ActionSet a = legal_actions(s, Side::Left);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == Action::idle());
  }

  TEST_CASE("neutral without a buffered pattern excludes specials") {
    const GameState s = fresh_state();
    const ActionSet a = legal_actions(s, Side::Left);
    CHECK(a.size() == 7);
    for (Action x : a) CHECK(x.kind != ActionKind::Special);
  }

  TEST_CASE("buffered pattern adds the special") {
    GameState s = fresh_state();
    advance(s, Action::idle(Motion::Down), Action::idle());
    advance(s, Action::idle(Motion::DownFwd), Action::idle());
    advance(s, Action::idle(Motion::FwdAtk), Action::idle());
    const ActionSet a = legal_actions(s, Side::Left);
    CHECK(a.size() == 8);
    CHECK(std::find(a.begin(), a.end(), Action::special(kFireball)) != a.end());
  }
}

TEST_SUITE("match_input_pattern") {
  const std::vector<InputToken> fireball = {InputToken::Down, InputToken::DownFwd, InputToken::FwdAtk};

  TEST_CASE("examples") {
    CHECK(match_input_pattern(history({{1, InputToken::Down}, {2, InputToken::DownFwd}, {3, InputToken::FwdAtk}}),
                              fireball, 8));
    CHECK_FALSE(match_input_pattern({}, fireball, 8));
    CHECK_FALSE(match_input_pattern(
        history({{1, InputToken::Down}, {10, InputToken::DownFwd}, {19, InputToken::FwdAtk}}), fireball, 8));
    CHECK(match_input_pattern(history({{1, InputToken::Down}, {9, InputToken::DownFwd}, {17, InputToken::FwdAtk}}),
                              fireball, 8));
    CHECK_THROWS_AS(match_input_pattern({}, {}, 8), EmptyPattern);
  }

  TEST_CASE("agrees with exhaustive window enumeration") {
    Rng rng(2024);
    const InputToken alphabet[] = {InputToken::Down, InputToken::DownFwd, InputToken::FwdAtk, InputToken::Atk};
    for (int trial = 0; trial < 3000; ++trial) {
      std::vector<InputEvent> h;
      int t = 0;
      const std::size_t n = rng.below(10);
      for (std::size_t i = 0; i < n; ++i) {
        t += 1 + static_cast<int>(rng.below(6));
        h.push_back({t, alphabet[rng.below(4)]});
      }
      std::vector<InputToken> p;
      const std::size_t m = 1 + rng.below(3);
      for (std::size_t i = 0; i < m; ++i) p.push_back(alphabet[rng.below(4)]);
      const int gap = 1 + static_cast<int>(rng.below(8));
      CHECK(match_input_pattern(h, p, gap) == brute_force_match(h, p, gap));
    }
  }
}

TEST_SUITE("round_result") {
  TEST_CASE("examples") {
    GameState s = fresh_state();
    CHECK_FALSE(round_result(s));
    s.fighters[1].health = 0;
    CHECK(round_result(s) == RoundResult{Winner::Left, EndCause::KO});
    s = fresh_state();
    s.timer = 0;
    s.fighters[0].health = 40;
    s.fighters[1].health = 55;
    CHECK(round_result(s) == RoundResult{Winner::Right, EndCause::TimeOut});
    s.fighters[0].health = 55;
    CHECK(round_result(s) == RoundResult{Winner::Draw, EndCause::TimeOut});
  }

  TEST_CASE("drawn rounds are replayed and the cap falls back to damage") {
    GameState s = fresh_state();
    s.timer = 0;
    GameState n = next_round(s);
    CHECK(n.round_wins == std::array<int, 2>{0, 0});
    CHECK(n.rounds_played == 1);
    CHECK(n.timer == default_rules()->round_length);
    n.rounds_played = 5;
    n.match_damage = {30, 20};
    CHECK(match_result(n) == MatchResult{Winner::Left, true});
  }
}

TEST_SUITE("properties") {
  TEST_CASE("random play keeps every engine invariant") {
    const int len = default_rules()->stage_length;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Rng rng(seed);
      GameState s = fresh_state(seed);
      int rounds = 0;
      while (!match_result(s)) {
        std::array<int, 2> health{s.fighters[0].health, s.fighters[1].health};
        while (!round_result(s)) {
          const Action l = random_legal(s, Side::Left, rng);
          const Action r = random_legal(s, Side::Right, rng);
          const GameState a = step(s, l, r);
          const GameState b = step(s, l, r);
          REQUIRE(a == b);
          s = a;
          for (int i = 0; i < 2; ++i) {
            const FighterState& f = s.fighters[i];
            REQUIRE(f.health <= health[i]);
            health[i] = f.health;
            REQUIRE(f.position >= 0);
            REQUIRE(f.position <= len);
            if (f.phase != Phase::Neutral && f.phase != Phase::Blocking) REQUIRE(f.phase_timer > 0);
          }
          for (const Projectile& p : s.projectiles) {
            REQUIRE(p.position >= 0);
            REQUIRE(p.position <= len);
          }
          REQUIRE(s.timer <= default_rules()->round_length);
        }
        s = next_round(s);
        ++rounds;
        REQUIRE(s.round_wins[0] <= 2);
        REQUIRE(s.round_wins[1] <= 2);
      }
      const MatchResult m = *match_result(s);
      if (!m.damage_tiebreak) {
        CHECK(std::max(s.round_wins[0], s.round_wins[1]) == 2);
        CHECK(std::min(s.round_wins[0], s.round_wins[1]) < 2);
      }
      CHECK(rounds <= default_rules()->max_rounds);
    }
  }

  TEST_CASE("action ids round-trip") {
    const CharacterSpec c = default_character();
    const std::vector<Action> all = {Action::idle(),          Action::idle(Motion::Down),
                                     Action::idle(Motion::DownFwd), Action::idle(Motion::DownBack),
                                     Action::idle(Motion::FwdAtk),  Action::move_left(),
                                     Action::move_right(),     Action::block(),
                                     Action::grab(),           Action::attack(kPunch),
                                     Action::attack(kHeavy),   Action::special(kFireball)};
    for (Action a : all) CHECK(parse_action(action_id(a, c), c) == a);
    CHECK(action_id(Action::attack(kPunch), c) == "Attack:Punch");
    CHECK_FALSE(parse_action("Attack:Grab", c));
    CHECK_FALSE(parse_action("Special:Punch", c));
    CHECK_FALSE(parse_action("Jump", c));
  }
}
