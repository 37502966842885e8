#pragma once

// Topological graph over classified edges: nodes are snapped endpoints,
// interior crossings are left unconnected.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "netqa/edge.hpp"
#include "netqa/geometry.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/ingest.hpp"
#include "netqa/length_policy.hpp"
#include "netqa/parallel.hpp"
#include "netqa/spatial_index.hpp"

namespace netqa {

inline constexpr double kDefaultSnapTolerance = 0.001;  // m
inline constexpr double kDefaultUndershootThreshold = 3.0;  // m

struct NetworkNode {
  std::size_t id = 0;
  Point2D location;
  std::size_t degree = 0;
  std::vector<std::size_t> edges;  // incident edge ids, ascending, self-loops listed once
};

struct Graph {
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;
  std::vector<std::vector<std::size_t>> components;  // component id -> edge ids
};

namespace detail {

class DisjointSet {
public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // The smaller root survives so labels follow input order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace detail

struct ComponentAssignment {
  std::vector<std::size_t> edge_component;
  std::vector<std::vector<std::size_t>> members;
};

/// Undirected reachability over shared nodes. Component ids are dense and
/// ordered by the lowest edge id they contain.
inline ComponentAssignment connected_components(const Graph& g) {
  const std::size_t n = g.edges.size();
  detail::DisjointSet ds(n);
  for (const auto& node : g.nodes) {
    for (std::size_t k = 1; k < node.edges.size(); ++k) ds.unite(node.edges[0], node.edges[k]);
  }
  ComponentAssignment out;
  out.edge_component.assign(n, kNone);
  std::map<std::size_t, std::size_t> root_to_id;
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t root = ds.find(e);
    auto [it, inserted] = root_to_id.emplace(root, out.members.size());
    if (inserted) out.members.emplace_back();
    out.edge_component[e] = it->second;
    out.members[it->second].push_back(e);
  }
  return out;
}

/// Endpoints within `snap_tolerance` of each other (transitively) share a
/// node placed at the first such endpoint in input order.
inline Graph build_graph(std::vector<NetworkEdge> edges, double snap_tolerance = kDefaultSnapTolerance) {
  if (!(snap_tolerance >= 0.0)) throw ConfigError("snap tolerance must be >= 0");
  const std::size_t n_end = edges.size() * 2;
  std::vector<Point2D> ends(n_end);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    ends[2 * e] = edges[e].geometry.front();
    ends[2 * e + 1] = edges[e].geometry.back();
  }

  detail::DisjointSet ds(n_end);
  if (snap_tolerance == 0.0) {
    std::map<std::pair<double, double>, std::size_t> exact;
    for (std::size_t i = 0; i < n_end; ++i) {
      auto [it, inserted] = exact.emplace(std::make_pair(ends[i].x, ends[i].y), i);
      if (!inserted) ds.unite(it->second, i);
    }
  } else {
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> buckets;
    auto cell_of = [&](Point2D p) {
      return std::make_pair(static_cast<std::int64_t>(std::floor(p.x / snap_tolerance)),
                            static_cast<std::int64_t>(std::floor(p.y / snap_tolerance)));
    };
    for (std::size_t i = 0; i < n_end; ++i) {
      const auto [cx, cy] = cell_of(ends[i]);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          const auto it = buckets.find({cx + dx, cy + dy});
          if (it == buckets.end()) continue;
          for (std::size_t j : it->second) {
            if (distance(ends[i], ends[j]) <= snap_tolerance) ds.unite(i, j);
          }
        }
      }
      buckets[{cx, cy}].push_back(i);
    }
  }

  Graph g;
  std::map<std::size_t, std::size_t> root_to_node;
  std::vector<std::size_t> end_node(n_end);
  for (std::size_t i = 0; i < n_end; ++i) {
    const std::size_t root = ds.find(i);
    auto [it, inserted] = root_to_node.emplace(root, g.nodes.size());
    if (inserted) g.nodes.push_back(NetworkNode{g.nodes.size(), ends[root], 0, {}});
    end_node[i] = it->second;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edges[e].from_node = end_node[2 * e];
    edges[e].to_node = end_node[2 * e + 1];
    for (std::size_t nid : {edges[e].from_node, edges[e].to_node}) {
      auto& node = g.nodes[nid];
      ++node.degree;
      if (node.edges.empty() || node.edges.back() != e) node.edges.push_back(e);
    }
  }
  g.edges = std::move(edges);

  auto comps = connected_components(g);
  for (std::size_t e = 0; e < g.edges.size(); ++e) g.edges[e].component = comps.edge_component[e];
  g.components = std::move(comps.members);
  return g;
}

inline Graph build_graph(const Dataset& d, double snap_tolerance = kDefaultSnapTolerance) {
  return build_graph(d.edges, snap_tolerance);
}

/// Infrastructure length per component id.
inline std::vector<double> component_lengths(const Graph& g, const LengthPolicy& policy) {
  std::vector<double> out(g.components.size(), 0.0);
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    for (std::size_t e : g.components[c]) out[c] += infrastructure_length(g.edges[e], policy);
  }
  return out;
}

struct ZipfEntry {
  std::size_t rank = 0;  // 1-based
  std::size_t component = 0;
  double length = 0.0;
};

/// Component lengths ranked descending; equal lengths keep component-id order.
inline std::vector<ZipfEntry> component_zipf(const std::vector<double>& lengths) {
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lengths[a] > lengths[b]; });
  std::vector<ZipfEntry> out;
  out.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) out.push_back({k + 1, order[k], lengths[order[k]]});
  return out;
}

inline std::vector<ZipfEntry> component_zipf(const Graph& g, const LengthPolicy& policy) {
  return component_zipf(component_lengths(g, policy));
}

inline std::vector<std::size_t> dangling_nodes(const Graph& g) {
  std::vector<std::size_t> out;
  for (const auto& n : g.nodes) {
    if (n.degree == 1) out.push_back(n.id);
  }
  return out;
}

struct Undershoot {
  std::size_t node = 0;
  std::size_t nearest_edge = 0;
  double gap = 0.0;
};

/// Dangling nodes lying within `threshold` of an edge they are not connected
/// to. Edges incident to the node, and edges incident to its neighbouring
/// nodes, never count as the target.
inline std::vector<Undershoot> detect_undershoots(const Graph& g, double threshold = kDefaultUndershootThreshold,
                                                  unsigned threads = 1) {
  if (!(threshold > 0.0)) throw ConfigError("undershoot threshold must be > 0");
  std::vector<BBox> boxes;
  boxes.reserve(g.edges.size());
  for (const auto& e : g.edges) boxes.push_back(e.geometry.bbox());
  const BoxIndex index(boxes);

  const auto dangling = dangling_nodes(g);
  std::vector<std::optional<Undershoot>> found(dangling.size());
  parallel_for(dangling.size(), threads, [&](std::size_t k) {
    const NetworkNode& node = g.nodes[dangling[k]];
    std::set<std::size_t> excluded(node.edges.begin(), node.edges.end());
    for (std::size_t e : node.edges) {
      for (std::size_t nb : {g.edges[e].from_node, g.edges[e].to_node}) {
        excluded.insert(g.nodes[nb].edges.begin(), g.nodes[nb].edges.end());
      }
    }
    BBox q;
    q.extend(node.location);
    std::optional<Undershoot> best;
    for (std::size_t e : index.query(q.expanded(threshold))) {
      if (excluded.count(e)) continue;
      const double d = point_to_polyline_distance(node.location, g.edges[e].geometry);
      if (d > 0.0 && d <= threshold && (!best || d < best->gap)) best = Undershoot{node.id, e, d};
    }
    found[k] = best;
  });

  std::vector<Undershoot> out;
  for (const auto& f : found) {
    if (f) out.push_back(*f);
  }
  return out;
}

/// Number of distinct components among edges crossing each cell; nullopt
/// for cells no edge crosses.
inline std::vector<std::optional<std::size_t>> local_component_count(const Graph& g, const HexGrid& grid,
                                                                     unsigned threads = 1) {
  std::vector<std::vector<CellPiece>> pieces(g.edges.size());
  parallel_for(g.edges.size(), threads, [&](std::size_t i) { pieces[i] = grid.pieces(g.edges[i].geometry); });
  std::vector<std::set<std::size_t>> seen(grid.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    for (const auto& p : pieces[e]) {
      if (p.cell != kNone) seen[p.cell].insert(g.edges[e].component);
    }
  }
  std::vector<std::optional<std::size_t>> out(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (!seen[c].empty()) out[c] = seen[c].size();
  }
  return out;
}

} // namespace netqa
