#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "netqa/error.hpp"
#include "netqa/geometry.hpp"

namespace netqa {

using Attributes = std::map<std::string, std::string>;

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

enum class InfraCategory { Protected, Unprotected };
enum class MappingModel { Centerline, SeparateGeometry };
enum class Directionality { Oneway, Bidirectional };

inline std::string_view to_string(InfraCategory c) {
  return c == InfraCategory::Protected ? "protected" : "unprotected";
}
inline std::string_view to_string(MappingModel m) {
  return m == MappingModel::Centerline ? "centerline" : "separate_geometry";
}
inline std::string_view to_string(Directionality d) {
  return d == Directionality::Oneway ? "oneway" : "bidirectional";
}

inline InfraCategory parse_category(std::string_view s) {
  if (s == "protected") return InfraCategory::Protected;
  if (s == "unprotected") return InfraCategory::Unprotected;
  throw ConfigError("unknown infrastructure category '" + std::string(s) + "'");
}
inline MappingModel parse_mapping(std::string_view s) {
  if (s == "centerline") return MappingModel::Centerline;
  if (s == "separate_geometry") return MappingModel::SeparateGeometry;
  throw ConfigError("unknown mapping model '" + std::string(s) + "'");
}
inline Directionality parse_direction(std::string_view s) {
  if (s == "oneway") return Directionality::Oneway;
  if (s == "bidirectional") return Directionality::Bidirectional;
  throw ConfigError("unknown directionality '" + std::string(s) + "'");
}

struct Classification {
  InfraCategory category = InfraCategory::Protected;
  MappingModel mapping = MappingModel::SeparateGeometry;
  Directionality direction = Directionality::Oneway;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// A classified infrastructure edge. Node and component fields are filled in
/// by build_graph.
struct NetworkEdge {
  std::string id;
  Polyline geometry;
  Classification cls;
  Attributes attributes;
  std::size_t from_node = kNone;
  std::size_t to_node = kNone;
  std::size_t component = kNone;
};

} // namespace netqa
