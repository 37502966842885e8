#pragma once

// Fixture builders and brute-force reference implementations used by the
// unit tests and the acceptance runner. The oracles deliberately avoid the
// library's own algorithms: sampling instead of exact geometry, dense
// matrices instead of sparse rows, exhaustive loops instead of indexes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "netqa/netqa.hpp"

namespace fixture {

using netqa::Point2D;

inline netqa::Classification separate() {
  return {netqa::InfraCategory::Protected, netqa::MappingModel::SeparateGeometry, netqa::Directionality::Oneway};
}

inline netqa::Classification centerline_both() {
  return {netqa::InfraCategory::Unprotected, netqa::MappingModel::Centerline, netqa::Directionality::Bidirectional};
}

inline netqa::NetworkEdge edge(std::string id, std::vector<Point2D> pts, netqa::Classification cls = separate(),
                               netqa::Attributes attrs = {}) {
  netqa::NetworkEdge e;
  e.id = std::move(id);
  e.geometry = netqa::Polyline(std::move(pts));
  e.cls = cls;
  e.attributes = std::move(attrs);
  return e;
}

inline netqa::MultiPolygon rectangle(double x0, double y0, double x1, double y1) {
  return {netqa::normalize_polygon({{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}})};
}

/// Random walk polylines inside [0, extent]^2.
inline std::vector<netqa::NetworkEdge> random_edges(std::mt19937_64& rng, std::size_t n, double extent,
                                                    std::size_t max_vertices = 6, double step = 120.0) {
  std::uniform_real_distribution<double> pos(0.0, extent), ang(0.0, 2 * std::numbers::pi), len(5.0, step);
  std::uniform_int_distribution<std::size_t> nv(2, max_vertices);
  std::vector<netqa::NetworkEdge> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Point2D> pts{{pos(rng), pos(rng)}};
    const std::size_t k = nv(rng);
    while (pts.size() < k) {
      const double a = ang(rng), l = len(rng);
      Point2D p{pts.back().x + l * std::cos(a), pts.back().y + l * std::sin(a)};
      p.x = std::clamp(p.x, 0.0, extent);
      p.y = std::clamp(p.y, 0.0, extent);
      if (p != pts.back()) pts.push_back(p);
    }
    out.push_back(edge("e" + std::to_string(i), pts, i % 3 == 0 ? centerline_both() : separate()));
  }
  return out;
}

/// Random edges whose endpoints come from a small set of lattice points, so
/// that shared endpoints are common.
inline std::vector<netqa::NetworkEdge> random_graph_edges(std::mt19937_64& rng, std::size_t n_edges, int span) {
  std::uniform_int_distribution<int> coord(0, span);
  std::uniform_int_distribution<int> bend(0, 2);
  std::vector<netqa::NetworkEdge> out;
  while (out.size() < n_edges) {
    const Point2D a{coord(rng) * 10.0, coord(rng) * 10.0};
    const Point2D b{coord(rng) * 10.0, coord(rng) * 10.0};
    if (a == b) continue;
    std::vector<Point2D> pts{a};
    if (bend(rng) == 0) pts.push_back({(a.x + b.x) / 2 + 3.0, (a.y + b.y) / 2 - 2.0});
    pts.push_back(b);
    out.push_back(edge("g" + std::to_string(out.size()), pts));
  }
  return out;
}

} // namespace fixture

namespace oracle {

using netqa::Point2D;

inline double pairwise_length(const std::vector<Point2D>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double dx = v[i + 1].x - v[i].x, dy = v[i + 1].y - v[i].y;
    s += std::sqrt(dx * dx + dy * dy);
  }
  return s;
}

inline std::vector<Point2D> sample(Point2D a, Point2D b, std::size_t n) {
  std::vector<Point2D> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
  }
  return out;
}

inline double euclid(Point2D a, Point2D b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)); }

/// Symmetric Hausdorff distance between two point samplings.
inline double sampled_hausdorff(Point2D a0, Point2D a1, Point2D b0, Point2D b1, std::size_t n = 10000) {
  const auto sa = sample(a0, a1, n), sb = sample(b0, b1, n);
  auto directed = [](const std::vector<Point2D>& from, const std::vector<Point2D>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = INFINITY;
      for (const auto& q : to) best = std::min(best, euclid(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(sa, sb), directed(sb, sa));
}

/// Distance to the closest of stepwise samples along every polyline piece.
inline double sampled_point_polyline(Point2D p, const std::vector<Point2D>& v, double step = 1e-4) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const auto n = static_cast<std::size_t>(std::ceil(euclid(v[i], v[i + 1]) / step));
    for (const auto& q : sample(v[i], v[i + 1], std::max<std::size_t>(n, 1))) best = std::min(best, euclid(p, q));
  }
  return best;
}

/// Edge partition into components via repeated boolean closure over exact
/// endpoint equality. Returns, for every edge, the smallest edge index in
/// its component.
inline std::vector<std::size_t> transitive_components(const std::vector<netqa::NetworkEdge>& edges) {
  const std::size_t n = edges.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = edges[i].geometry;
      const auto& b = edges[j].geometry;
      reach[i][j] = i == j || a.front() == b.front() || a.front() == b.back() || a.back() == b.front() ||
                    a.back() == b.back();
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) reach[i][j] |= reach[k][j];
    }
  }
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (reach[i][j]) {
        root[i] = j;
        break;
      }
    }
  }
  return root;
}

/// Distinct endpoint locations with their incident edge-end counts.
inline std::map<std::pair<double, double>, std::size_t> endpoint_groups(const std::vector<netqa::NetworkEdge>& edges) {
  std::map<std::pair<double, double>, std::size_t> out;
  for (const auto& e : edges) {
    ++out[{e.geometry.front().x, e.geometry.front().y}];
    ++out[{e.geometry.back().x, e.geometry.back().y}];
  }
  return out;
}

/// Centres of the flat-top lattice and nearest-centre binning (a point lies
/// in the hexagon whose centre is closest).
struct Lattice {
  Point2D origin;
  double edge;

  explicit Lattice(Point2D o, double cell_area) : origin(o), edge(std::sqrt(2.0 * cell_area / (3.0 * std::sqrt(3.0)))) {}

  [[nodiscard]] Point2D center(int q, int r) const {
    return {origin.x + 1.5 * edge * q, origin.y + std::sqrt(3.0) * edge * (r + q / 2.0)};
  }

  [[nodiscard]] std::pair<int, int> nearest(Point2D p) const {
    const int qg = static_cast<int>(std::floor((p.x - origin.x) / (1.5 * edge)));
    std::pair<int, int> best{0, 0};
    double bd = INFINITY;
    for (int q = qg - 2; q <= qg + 2; ++q) {
      const int rg = static_cast<int>(std::floor((p.y - origin.y) / (std::sqrt(3.0) * edge) - q / 2.0));
      for (int r = rg - 2; r <= rg + 2; ++r) {
        const double d = euclid(p, center(q, r));
        if (d < bd) {
          bd = d;
          best = {q, r};
        }
      }
    }
    return best;
  }
};

/// Infrastructure length per lattice cell from 0.1 m steps binned at their
/// midpoints.
inline std::map<std::pair<int, int>, double> discretized_cell_lengths(const std::vector<netqa::NetworkEdge>& edges,
                                                                      const Lattice& lattice,
                                                                      const netqa::LengthPolicy& policy,
                                                                      double step = 0.1) {
  std::map<std::pair<int, int>, double> out;
  for (const auto& e : edges) {
    const double factor = policy.factor(e.cls);
    const auto v = e.geometry.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double len = euclid(v[i], v[i + 1]);
      const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
      for (std::size_t k = 0; k < n; ++k) {
        const double t = (k + 0.5) / static_cast<double>(n);
        const Point2D m{v[i].x + (v[i + 1].x - v[i].x) * t, v[i].y + (v[i + 1].y - v[i].y) * t};
        out[lattice.nearest(m)] += len / static_cast<double>(n) * factor;
      }
    }
  }
  return out;
}

/// Winding-number point in polygon over rings given as open vertex lists.
inline bool inside(const std::vector<std::vector<Point2D>>& rings, Point2D p) {
  int crossings = 0;
  for (const auto& ring : rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2D a = ring[i], b = ring[(i + 1) % ring.size()];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (x > p.x) ++crossings;
      }
    }
  }
  return crossings % 2 == 1;
}

inline std::vector<double> discretized_polygon_lengths(const std::vector<netqa::NetworkEdge>& edges,
                                                       const std::vector<std::vector<std::vector<Point2D>>>& polygons,
                                                       const netqa::LengthPolicy& policy, double step = 0.1) {
  std::vector<double> out(polygons.size(), 0.0);
  for (const auto& e : edges) {
    const double factor = policy.factor(e.cls);
    const auto v = e.geometry.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double len = euclid(v[i], v[i + 1]);
      const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
      for (std::size_t k = 0; k < n; ++k) {
        const double t = (k + 0.5) / static_cast<double>(n);
        const Point2D m{v[i].x + (v[i + 1].x - v[i].x) * t, v[i].y + (v[i + 1].y - v[i].y) * t};
        for (std::size_t p = 0; p < polygons.size(); ++p) {
          if (inside(polygons[p], m)) out[p] += len / static_cast<double>(n) * factor;
        }
      }
    }
  }
  return out;
}

/// All-pairs matcher with the library's pair score.
inline std::vector<netqa::MatchRecord> brute_match(const std::vector<netqa::Segment>& from,
                                                   const std::vector<netqa::Segment>& to,
                                                   const netqa::MatchConfig& cfg) {
  std::vector<netqa::MatchRecord> out;
  for (std::size_t i = 0; i < from.size(); ++i) {
    netqa::MatchRecord rec{i, std::nullopt, {}};
    for (std::size_t j = 0; j < to.size(); ++j) {
      const auto s = netqa::evaluate_pair(from[i], to[j], cfg);
      if (s && (!rec.matched || s->composite < rec.score.composite)) {
        rec.matched = j;
        rec.score = *s;
      }
    }
    out.push_back(rec);
  }
  return out;
}

/// k nearest by full sort of (distance, key) pairs.
inline std::vector<std::vector<std::size_t>> brute_knn(const std::vector<Point2D>& pts,
                                                       const std::vector<std::uint64_t>& keys, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::tuple<long long, std::uint64_t, std::size_t>> all;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) all.emplace_back(std::llround(euclid(pts[i], pts[j]) * 1e6), keys[j], j);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t m = 0; m < k; ++m) out[i].push_back(std::get<2>(all[m]));
  }
  return out;
}

inline std::vector<std::vector<double>> dense_weights(const netqa::SpatialWeights& w) {
  std::vector<std::vector<double>> m(w.size(), std::vector<double>(w.size(), 0.0));
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t k = 0; k < w.neighbors[i].size(); ++k) m[i][w.neighbors[i][k]] += w.weights[i][k];
  }
  return m;
}

/// I = n / S0 * sum_ij w_ij (x_i - m)(x_j - m) / sum_i (x_i - m)^2
inline double moran_double_loop(const std::vector<double>& x, const std::vector<std::vector<double>>& w) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double num = 0.0, den = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    for (std::size_t j = 0; j < x.size(); ++j) {
      num += w[i][j] * (x[i] - mean) * (x[j] - mean);
      s0 += w[i][j];
    }
  }
  return n / s0 * num / den;
}

/// I_i = z_i * sum_j w_ij z_j with z scaled by the population standard deviation.
inline std::vector<double> local_moran_direct(const std::vector<double>& x, const std::vector<std::vector<double>>& w) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lag = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lag += w[i][j] * (x[j] - mean) / sd;
    out.push_back((x[i] - mean) / sd * lag);
  }
  return out;
}

inline double pearson_textbook(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy));
}

/// Average ranks (1-based) with ties sharing the mean rank, by counting.
inline std::vector<double> ranks_by_counting(const std::vector<double>& x) {
  std::vector<double> r;
  for (double v : x) {
    double less = 0, equal = 0;
    for (double u : x) {
      less += u < v;
      equal += u == v;
    }
    r.push_back(less + (equal + 1.0) / 2.0);
  }
  return r;
}

} // namespace oracle
