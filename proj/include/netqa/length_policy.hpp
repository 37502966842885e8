#pragma once

#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "netqa/edge.hpp"
#include "netqa/error.hpp"

namespace netqa {

/// Multiplier from geometric length to infrastructure length, keyed on how
/// an edge is mapped. A centerline geometry carrying lanes on both sides
/// counts twice so it compares with datasets that draw each side separately.
class LengthPolicy {
public:
  using Key = std::pair<MappingModel, Directionality>;

  LengthPolicy() {
    factors_[{MappingModel::Centerline, Directionality::Bidirectional}] = 2.0;
    factors_[{MappingModel::Centerline, Directionality::Oneway}] = 1.0;
    factors_[{MappingModel::SeparateGeometry, Directionality::Bidirectional}] = 1.0;
    factors_[{MappingModel::SeparateGeometry, Directionality::Oneway}] = 1.0;
  }

  static LengthPolicy empty() {
    LengthPolicy p;
    p.factors_.clear();
    return p;
  }

  void set(MappingModel m, Directionality d, double factor) {
    if (!(factor >= 1.0)) throw ConfigError("length multiplier must be >= 1");
    factors_[{m, d}] = factor;
  }

  [[nodiscard]] double factor(const Classification& c) const {
    const auto it = factors_.find({c.mapping, c.direction});
    if (it == factors_.end()) {
      throw ConfigError("length policy has no multiplier for (" + std::string(to_string(c.mapping)) + ", " +
                        std::string(to_string(c.direction)) + ")");
    }
    return it->second;
  }

  /// Accepts {"centerline/bidirectional": 2, ...}; listed keys override the
  /// defaults.
  static LengthPolicy from_json(const nlohmann::json& j) {
    LengthPolicy p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw ConfigError("length_policy must be an object");
    for (const auto& [k, v] : j.items()) {
      const auto slash = k.find('/');
      if (slash == std::string::npos || !v.is_number()) {
        throw ConfigError("length_policy entries look like \"centerline/bidirectional\": 2");
      }
      p.set(parse_mapping(k.substr(0, slash)), parse_direction(k.substr(slash + 1)), v.get<double>());
    }
    return p;
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, f] : factors_) {
      j[std::string(to_string(k.first)) + "/" + std::string(to_string(k.second))] = f;
    }
    return j;
  }

private:
  std::map<Key, double> factors_;
};

/// Geometric length times the policy multiplier.
inline double infrastructure_length(const NetworkEdge& e, const LengthPolicy& policy) {
  return polyline_length(e.geometry) * policy.factor(e.cls);
}

} // namespace netqa
