#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arena/engine.hpp"

namespace arena {

/// Observation fields a condition can test. Flags read as 0/1.
enum class Feature : std::uint8_t {
  Distance,
  OpponentAttacking,
  ProjectileOnScreen,
  DamageDealt,
  FacingRight,
  AgainstWall,
  OwnHealth,
  OpponentHealth,
  HealthAdvantage,
  Timer,
  OpponentInHitstun,
  CanAct,
  InHitstun,
  OpponentBlocking,
  LastHitLanded,
  LastHitBlocked,
  TookHit,
  Count
};

inline constexpr std::size_t kFeatureCount = static_cast<std::size_t>(Feature::Count);

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

/// Values a condition is evaluated against: the observation fields plus any
/// number of named extras (events such as "coin" in abstract machines).
/// Absent names read as 0.
struct Features {
  std::array<double, kFeatureCount> values{};
  std::vector<std::pair<std::string, double>> named;

  double get(Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double get(std::string_view name) const;
  Features& set(std::string name, double v);

  static Features from(const Observation& obs);
};

/// Predicate over Features expressed as a comparison tree.
///
/// JSON forms:
///   true | false
///   {"all": [c, ...]}   {"any": [c, ...]}   {"not": c}
///   {"flag": "name"}                               name != 0
///   {"field": "distance", "op": "<", "value": 10}  ops: < <= > >= == !=
class Condition {
 public:
  enum class Op : std::uint8_t { True, False, All, Any, Not, Lt, Le, Gt, Ge, Eq, Ne };

  Condition() = default;
  static Condition always() { return Condition(Op::True); }
  static Condition never() { return Condition(Op::False); }
  static Condition all(std::vector<Condition> cs);
  static Condition any(std::vector<Condition> cs);
  static Condition negate(Condition c);
  static Condition compare(std::string field, Op op, double value);
  static Condition flag(std::string field) { return compare(std::move(field), Op::Ne, 0.0); }

  bool eval(const Features& f) const;
  bool eval(const Observation& obs) const { return eval(Features::from(obs)); }

  Op op() const { return op_; }
  const std::vector<Condition>& children() const { return children_; }
  const std::string& field() const { return field_; }
  double value() const { return value_; }

  static Condition from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  explicit Condition(Op op) : op_(op) {}

  Op op_ = Op::True;
  std::vector<Condition> children_;
  std::string field_;
  int feature_ = -1;  // resolved Feature index, -1 for named extras
  double value_ = 0.0;
};

}  // namespace arena
