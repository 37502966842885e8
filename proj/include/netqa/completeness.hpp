#pragma once

// Infrastructure lengths and densities at global, cell and polygon level.
// Densities are in km per km^2.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/ingest.hpp"
#include "netqa/length_policy.hpp"

namespace netqa {

using CellValues = std::vector<std::optional<double>>;  // aligned with grid.cells()

struct LengthTotals {
  double geometric = 0.0;       // m
  double infrastructure = 0.0;  // m
  double protected_length = 0.0;
  double unprotected_length = 0.0;
};

inline LengthTotals length_totals(const std::vector<NetworkEdge>& edges, const LengthPolicy& policy) {
  LengthTotals t;
  for (const auto& e : edges) {
    const double infra = infrastructure_length(e, policy);
    t.geometric += polyline_length(e.geometry);
    t.infrastructure += infra;
    (e.cls.category == InfraCategory::Protected ? t.protected_length : t.unprotected_length) += infra;
  }
  return t;
}

struct DensitySurface {
  std::string dataset;
  Point2D grid_origin;
  double cell_area = 0.0;
  std::size_t cell_count = 0;
  CellValues density;

  [[nodiscard]] bool same_grid(const DensitySurface& o) const {
    return grid_origin == o.grid_origin && cell_area == o.cell_area && cell_count == o.cell_count;
  }
};

inline DensitySurface density_surface(const CellLengths& lengths, const HexGrid& grid, std::string dataset) {
  if (lengths.per_cell.size() != grid.size()) throw Error("cell lengths do not belong to this grid");
  DensitySurface s{std::move(dataset), grid.origin(), grid.cell_area(), grid.size(), CellValues(grid.size())};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (lengths.touched[c]) s.density[c] = lengths.per_cell[c] / grid.cell_area() * 1000.0;
  }
  return s;
}

/// Per-cell `b - a`, where `a` is the candidate dataset and `b` the
/// reference. Negative values mean more candidate infrastructure. A cell
/// missing from one surface counts as 0 there; missing from both stays null.
inline CellValues density_difference(const DensitySurface& a, const DensitySurface& b) {
  if (!a.same_grid(b)) throw Error("density surfaces are defined on different grids");
  CellValues out(a.density.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (a.density[c] || b.density[c]) out[c] = b.density[c].value_or(0.0) - a.density[c].value_or(0.0);
  }
  return out;
}

/// Infrastructure length of the edges inside each polygon.
inline std::vector<double> polygon_lengths(const std::vector<NetworkEdge>& edges,
                                           const std::vector<NamedPolygon>& polygons, const LengthPolicy& policy) {
  std::vector<double> out(polygons.size(), 0.0);
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    const BBox pb = bbox(polygons[p].geometry);
    for (const auto& e : edges) {
      if (!e.geometry.bbox().intersects(pb)) continue;
      double len = 0.0;
      for (const auto& part : polygons[p].geometry) len += clipped_length(e.geometry, part);
      out[p] += len * policy.factor(e.cls);
    }
  }
  return out;
}

namespace detail {

inline double ring_boundary_distance(const Polygon& poly, Point2D p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
      best = std::min(best, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
    }
  }
  return best;
}

/// True when some boundary piece of `a` lies strictly inside `b`.
inline bool boundary_enters(const Polygon& a, const Polygon& b) {
  constexpr double kBoundaryTol = 1e-7;
  for (const auto& ring : a.rings) {
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
      const Point2D s = ring[i], t = ring[(i + 1) % n];
      const auto ts = crossing_params(s, t, b);
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const Point2D m = lerp(s, t, (ts[k - 1] + ts[k]) / 2.0);
        if (contains(b, m) && ring_boundary_distance(b, m) > kBoundaryTol) return true;
      }
    }
  }
  return false;
}

inline bool polygons_overlap(const MultiPolygon& a, const MultiPolygon& b) {
  if (!bbox(a).intersects(bbox(b))) return false;
  for (const auto& pa : a) {
    for (const auto& pb : b) {
      if (boundary_enters(pa, pb) || boundary_enters(pb, pa)) return true;
    }
  }
  return false;
}

} // namespace detail

struct PolygonSummary {
  std::string name;
  double area = 0.0;                    // m^2
  double length_a = 0.0, length_b = 0.0;  // m
  double density_a = 0.0, density_b = 0.0;  // km/km^2
  std::optional<double> relative_difference;  // (b - a) / max(a, b)
};

struct PolygonAggregate {
  std::vector<PolygonSummary> rows;
  std::vector<std::string> warnings;
};

/// Per-polygon totals for both datasets. Overlapping polygons are reported
/// as a warning; edges in the overlap are counted in each.
inline PolygonAggregate polygon_aggregate(const std::vector<NetworkEdge>& edges_a,
                                          const std::vector<NetworkEdge>& edges_b,
                                          const std::vector<NamedPolygon>& polygons, const LengthPolicy& policy) {
  PolygonAggregate out;
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    for (std::size_t j = i + 1; j < polygons.size(); ++j) {
      if (detail::polygons_overlap(polygons[i].geometry, polygons[j].geometry)) {
        out.warnings.push_back("polygons '" + polygons[i].name + "' and '" + polygons[j].name +
                               "' overlap; shared length is counted twice");
      }
    }
  }
  const auto la = polygon_lengths(edges_a, polygons, policy);
  const auto lb = polygon_lengths(edges_b, polygons, policy);
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    PolygonSummary row;
    row.name = polygons[p].name;
    row.area = area(polygons[p].geometry);
    row.length_a = la[p];
    row.length_b = lb[p];
    row.density_a = la[p] / row.area * 1000.0;
    row.density_b = lb[p] / row.area * 1000.0;
    const double denom = std::max(la[p], lb[p]);
    if (denom > 0.0) row.relative_difference = (lb[p] - la[p]) / denom;
    out.rows.push_back(std::move(row));
  }
  return out;
}

enum class Correlation { Pearson, Spearman };

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace detail

/// Correlation over cells where both metrics are present.
inline double correlate(const CellValues& a, const CellValues& b, Correlation method = Correlation::Pearson) {
  if (a.size() != b.size()) throw Error("correlate: metrics have different lengths");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      x.push_back(*a[i]);
      y.push_back(*b[i]);
    }
  }
  if (x.size() < 3) throw StatsError("correlation needs at least 3 complete pairs");
  if (method == Correlation::Spearman) return detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
  return detail::pearson(x, y);
}

} // namespace netqa
