#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "netqa/completeness.hpp"
#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/length_policy.hpp"
#include "netqa/parallel.hpp"

namespace netqa {

/// A logical tag; any of `keys` with a nonempty value counts as present.
struct TagSpec {
  std::string name;
  std::vector<std::string> keys;

  static TagSpec make(std::string name, std::vector<std::string> keys) {
    if (keys.empty()) throw ConfigError("tag '" + name + "' needs at least one key");
    return {std::move(name), std::move(keys)};
  }
};

inline std::vector<TagSpec> default_tag_specs() {
  return {
      TagSpec::make("surface", {"surface", "cycleway:surface"}),
      TagSpec::make("lit", {"lit"}),
      TagSpec::make("width", {"width", "cycleway:width"}),
      TagSpec::make("maxspeed", {"maxspeed"}),
  };
}

inline bool tag_presence(const NetworkEdge& e, const TagSpec& spec) {
  for (const auto& k : spec.keys) {
    const auto it = e.attributes.find(k);
    if (it != e.attributes.end() && !it->second.empty()) return true;
  }
  return false;
}

inline std::vector<bool> tag_presence(const std::vector<NetworkEdge>& edges, const TagSpec& spec) {
  std::vector<bool> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(tag_presence(e, spec));
  return out;
}

enum class TagWeighting { Infrastructure, Geometric };

struct TagShare {
  std::string tag;
  double global_pct = 0.0;
  double tagged_length = 0.0;
  double total_length = 0.0;
  CellValues cell_pct;
};

/// Length-weighted share (in percent) of the network carrying the tag.
inline TagShare tag_share(const std::vector<NetworkEdge>& edges, const TagSpec& spec, const HexGrid& grid,
                          const LengthPolicy& policy, TagWeighting weighting = TagWeighting::Infrastructure,
                          unsigned threads = 1) {
  std::vector<std::vector<CellPiece>> pieces(edges.size());
  parallel_for(edges.size(), threads, [&](std::size_t i) { pieces[i] = grid.pieces(edges[i].geometry); });

  TagShare s;
  s.tag = spec.name;
  std::vector<double> total(grid.size(), 0.0), tagged(grid.size(), 0.0);
  std::vector<bool> occupied(grid.size(), false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double factor = weighting == TagWeighting::Infrastructure ? policy.factor(edges[i].cls) : 1.0;
    const bool present = tag_presence(edges[i], spec);
    const double len = polyline_length(edges[i].geometry) * factor;
    s.total_length += len;
    if (present) s.tagged_length += len;
    for (const auto& p : pieces[i]) {
      if (p.cell == kNone) continue;
      occupied[p.cell] = true;
      total[p.cell] += p.length * factor;
      if (present) tagged[p.cell] += p.length * factor;
    }
  }
  s.global_pct = s.total_length > 0.0 ? 100.0 * s.tagged_length / s.total_length : 0.0;
  s.cell_pct.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (occupied[c] && total[c] > 0.0) s.cell_pct[c] = std::min(100.0, 100.0 * tagged[c] / total[c]);
  }
  return s;
}

} // namespace netqa
