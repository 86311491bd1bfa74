#include "arena/condition.hpp"

#include <nlohmann/json.hpp>

#include "arena/errors.hpp"

namespace arena {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "distance",          "opponent_attacking", "projectile_on_screen", "damage_dealt",
    "facing_right",      "against_wall",       "own_health",           "opponent_health",
    "health_advantage",  "timer",              "opponent_in_hitstun",  "can_act",
    "in_hitstun",        "opponent_blocking",  "last_hit_landed",      "last_hit_blocked",
    "took_hit",
};

constexpr std::array<std::pair<Condition::Op, std::string_view>, 6> kCompareOps = {{
    {Condition::Op::Lt, "<"},
    {Condition::Op::Le, "<="},
    {Condition::Op::Gt, ">"},
    {Condition::Op::Ge, ">="},
    {Condition::Op::Eq, "=="},
    {Condition::Op::Ne, "!="},
}};

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  return std::nullopt;
}

double Features::get(std::string_view name) const {
  if (auto f = parse_feature(name)) return get(*f);
  for (const auto& [k, v] : named)
    if (k == name) return v;
  return 0.0;
}

Features& Features::set(std::string name, double v) {
  if (auto f = parse_feature(name)) {
    values[static_cast<std::size_t>(*f)] = v;
    return *this;
  }
  for (auto& [k, val] : named)
    if (k == name) {
      val = v;
      return *this;
    }
  named.emplace_back(std::move(name), v);
  return *this;
}

Features Features::from(const Observation& o) {
  Features f;
  auto put = [&](Feature k, double v) { f.values[static_cast<std::size_t>(k)] = v; };
  put(Feature::Distance, o.distance);
  put(Feature::OpponentAttacking, o.opponent_attacking);
  put(Feature::ProjectileOnScreen, o.projectile_on_screen);
  put(Feature::DamageDealt, o.damage_dealt);
  put(Feature::FacingRight, o.facing == Facing::Right);
  put(Feature::AgainstWall, o.against_wall);
  put(Feature::OwnHealth, o.own_health);
  put(Feature::OpponentHealth, o.opponent_health);
  put(Feature::HealthAdvantage, o.own_health - o.opponent_health);
  put(Feature::Timer, o.timer);
  put(Feature::OpponentInHitstun, o.opponent_in_hitstun);
  put(Feature::CanAct, o.can_act);
  put(Feature::InHitstun, o.in_hitstun);
  put(Feature::OpponentBlocking, o.opponent_blocking);
  put(Feature::LastHitLanded, o.last_hit_landed);
  put(Feature::LastHitBlocked, o.last_hit_blocked);
  put(Feature::TookHit, o.took_hit);
  return f;
}

Condition Condition::all(std::vector<Condition> cs) {
  Condition c(Op::All);
  c.children_ = std::move(cs);
  return c;
}

Condition Condition::any(std::vector<Condition> cs) {
  Condition c(Op::Any);
  c.children_ = std::move(cs);
  return c;
}

Condition Condition::negate(Condition inner) {
  Condition c(Op::Not);
  c.children_.push_back(std::move(inner));
  return c;
}

Condition Condition::compare(std::string field, Op op, double value) {
  if (op < Op::Lt) throw ConfigError("compare needs a comparison operator");
  Condition c(op);
  if (auto f = parse_feature(field)) c.feature_ = static_cast<int>(*f);
  c.field_ = std::move(field);
  c.value_ = value;
  return c;
}

bool Condition::eval(const Features& f) const {
  switch (op_) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::All:
      for (const auto& c : children_)
        if (!c.eval(f)) return false;
      return true;
    case Op::Any:
      for (const auto& c : children_)
        if (c.eval(f)) return true;
      return false;
    case Op::Not: return !children_.front().eval(f);
    default: break;
  }
  const double x = feature_ >= 0 ? f.values[static_cast<std::size_t>(feature_)] : f.get(field_);
  switch (op_) {
    case Op::Lt: return x < value_;
    case Op::Le: return x <= value_;
    case Op::Gt: return x > value_;
    case Op::Ge: return x >= value_;
    case Op::Eq: return x == value_;
    case Op::Ne: return x != value_;
    default: return false;
  }
}

Condition Condition::from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>() ? always() : never();
  if (!j.is_object()) throw ConfigError("condition must be a boolean or an object");
  auto list = [&](const char* key) {
    if (!j.at(key).is_array() || j.at(key).empty())
      throw ConfigError(std::string("condition '") + key + "' needs a non-empty array");
    std::vector<Condition> cs;
    for (const auto& c : j.at(key)) cs.push_back(from_json(c));
    return cs;
  };
  try {
    if (j.contains("all")) return all(list("all"));
    if (j.contains("any")) return any(list("any"));
    if (j.contains("not")) return negate(from_json(j.at("not")));
    if (j.contains("flag")) return flag(j.at("flag").get<std::string>());
    if (j.contains("field")) {
      const auto op_name = j.at("op").get<std::string>();
      for (const auto& [op, name] : kCompareOps)
        if (name == op_name) return compare(j.at("field").get<std::string>(), op, j.at("value").get<double>());
      throw ConfigError("unknown comparison operator '" + op_name + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed condition: ") + e.what());
  }
  throw ConfigError("unrecognised condition " + j.dump());
}

nlohmann::json Condition::to_json() const {
  using nlohmann::json;
  auto list = [&] {
    json arr = json::array();
    for (const auto& c : children_) arr.push_back(c.to_json());
    return arr;
  };
  switch (op_) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::All: return json{{"all", list()}};
    case Op::Any: return json{{"any", list()}};
    case Op::Not: return json{{"not", children_.front().to_json()}};
    default: break;
  }
  if (op_ == Op::Ne && value_ == 0.0) return json{{"flag", field_}};
  for (const auto& [op, name] : kCompareOps)
    if (op == op_) return json{{"field", field_}, {"op", name}, {"value", value_}};
  return false;
}

}  // namespace arena
