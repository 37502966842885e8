#pragma once

// Planar geometry in a projected CRS. All lengths are meters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "netqa/error.hpp"

namespace netqa {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2D&, const Point2D&) = default;
  constexpr Point2D operator+(Point2D o) const { return {x + o.x, y + o.y}; }
  constexpr Point2D operator-(Point2D o) const { return {x - o.x, y - o.y}; }
  constexpr Point2D operator*(double s) const { return {x * s, y * s}; }
};

inline constexpr double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D a) { return std::hypot(a.x, a.y); }
inline double distance(Point2D a, Point2D b) { return norm(b - a); }
inline constexpr Point2D lerp(Point2D a, Point2D b, double t) { return a + (b - a) * t; }
inline bool is_finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void extend(Point2D p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void extend(const BBox& b) {
    min_x = std::min(min_x, b.min_x);
    min_y = std::min(min_y, b.min_y);
    max_x = std::max(max_x, b.max_x);
    max_y = std::max(max_y, b.max_y);
  }
  [[nodiscard]] bool empty() const { return min_x > max_x || min_y > max_y; }
  [[nodiscard]] BBox expanded(double d) const { return {min_x - d, min_y - d, max_x + d, max_y + d}; }
  [[nodiscard]] bool intersects(const BBox& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
};

/// True when a bounding box fits inside the longitude/latitude range, which is
/// how geographic (degree) coordinates are told apart from projected meters.
inline bool looks_geographic(const BBox& b) {
  return !b.empty() && std::abs(b.min_x) <= 180.0 && std::abs(b.max_x) <= 180.0 &&
         std::abs(b.min_y) <= 90.0 && std::abs(b.max_y) <= 90.0;
}

/// Ordered vertex list with at least two vertices, no consecutive duplicates
/// and positive length.
class Polyline {
public:
  Polyline() = default;

  explicit Polyline(std::vector<Point2D> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
      throw GeometryError("polyline needs at least 2 vertices");
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!is_finite(vertices_[i])) {
        throw GeometryError("polyline vertex is not finite");
      }
      if (i > 0 && vertices_[i] == vertices_[i - 1]) {
        throw GeometryError("polyline has consecutive duplicate vertices");
      }
    }
  }

  /// Drops consecutive duplicates; nullopt when fewer than two distinct
  /// vertices remain or a coordinate is not finite.
  static std::optional<Polyline> make(std::vector<Point2D> vertices) {
    std::vector<Point2D> cleaned;
    cleaned.reserve(vertices.size());
    for (const auto& p : vertices) {
      if (!is_finite(p)) return std::nullopt;
      if (cleaned.empty() || cleaned.back() != p) cleaned.push_back(p);
    }
    if (cleaned.size() < 2) return std::nullopt;
    return Polyline(std::move(cleaned));
  }

  [[nodiscard]] std::span<const Point2D> vertices() const { return vertices_; }
  [[nodiscard]] std::size_t size() const { return vertices_.size(); }
  [[nodiscard]] Point2D front() const { return vertices_.front(); }
  [[nodiscard]] Point2D back() const { return vertices_.back(); }
  [[nodiscard]] Point2D operator[](std::size_t i) const { return vertices_[i]; }

  [[nodiscard]] BBox bbox() const {
    BBox b;
    for (const auto& p : vertices_) b.extend(p);
    return b;
  }

  friend bool operator==(const Polyline&, const Polyline&) = default;

private:
  std::vector<Point2D> vertices_;
};

inline double polyline_length(const Polyline& p) {
  double total = 0.0;
  const auto v = p.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) total += distance(v[i - 1], v[i]);
  return total;
}

/// A straight piece of a parent polyline. `start`/`end` are points on the
/// parent at arc positions `offset` and `offset + length`; `length` is the arc
/// length, which equals the chord length whenever the piece does not span a
/// parent vertex.
struct Segment {
  Point2D start;
  Point2D end;
  std::size_t parent_edge = 0;
  double offset = 0.0;
  double length = 0.0;

  [[nodiscard]] double chord_length() const { return distance(start, end); }
  [[nodiscard]] Point2D midpoint() const { return lerp(start, end, 0.5); }
  [[nodiscard]] BBox bbox() const {
    BBox b;
    b.extend(start);
    b.extend(end);
    return b;
  }
};

/// Point at arc-length position `s` along the polyline (clamped to its ends).
inline Point2D point_at(const Polyline& p, double s) {
  const auto v = p.vertices();
  if (s <= 0.0) return v.front();
  double walked = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double piece = distance(v[i - 1], v[i]);
    if (walked + piece >= s) {
      return lerp(v[i - 1], v[i], (s - walked) / piece);
    }
    walked += piece;
  }
  return v.back();
}

/// Splits a polyline into consecutive pieces of `seg_len` meters. A trailing
/// remainder shorter than seg_len/2 is merged into the previous piece; a
/// polyline shorter than seg_len yields a single piece.
inline std::vector<Segment> segmentize(const Polyline& p, double seg_len, std::size_t parent_edge = 0) {
  if (!(seg_len > 0.0) || !std::isfinite(seg_len)) {
    throw GeometryError("segment length must be positive");
  }
  const double total = polyline_length(p);
  constexpr double kExactTol = 1e-9;

  auto full = static_cast<std::size_t>(std::floor(total / seg_len + kExactTol));
  std::vector<double> cuts;  // arc positions of piece boundaries, including both ends
  cuts.push_back(0.0);
  if (full == 0) {
    cuts.push_back(total);
  } else {
    const double remainder = total - static_cast<double>(full) * seg_len;
    const std::size_t interior = (remainder > kExactTol && remainder >= seg_len / 2.0) ? full : full - 1;
    for (std::size_t k = 1; k <= interior; ++k) cuts.push_back(static_cast<double>(k) * seg_len);
    cuts.push_back(total);
  }

  // Walk the polyline once, emitting boundary points in order.
  const auto v = p.vertices();
  std::vector<Point2D> points;
  points.reserve(cuts.size());
  std::size_t i = 1;
  double walked = 0.0;
  for (double c : cuts) {
    while (i + 1 < v.size() && walked + distance(v[i - 1], v[i]) < c) {
      walked += distance(v[i - 1], v[i]);
      ++i;
    }
    if (c <= 0.0) {
      points.push_back(v.front());
    } else if (c >= total) {
      points.push_back(v.back());
    } else {
      const double piece = distance(v[i - 1], v[i]);
      points.push_back(lerp(v[i - 1], v[i], std::clamp((c - walked) / piece, 0.0, 1.0)));
    }
  }

  std::vector<Segment> out;
  out.reserve(cuts.size() - 1);
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    out.push_back(Segment{points[k - 1], points[k], parent_edge, cuts[k - 1], cuts[k] - cuts[k - 1]});
  }
  return out;
}

inline double point_segment_distance(Point2D p, Point2D a, Point2D b) {
  const Point2D ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, lerp(a, b, t));
}

/// Continuous Hausdorff distance between two straight segments. Distance to
/// a segment is convex along the other segment, so each directed distance is
/// attained at an endpoint.
inline double hausdorff_distance(const Segment& a, const Segment& b) {
  const double ab = std::max(point_segment_distance(a.start, b.start, b.end),
                             point_segment_distance(a.end, b.start, b.end));
  const double ba = std::max(point_segment_distance(b.start, a.start, a.end),
                             point_segment_distance(b.end, a.start, a.end));
  return std::max(ab, ba);
}

/// Undirected acute angle between the two segment directions, in [0, 90].
inline double segment_angle_deg(const Segment& a, const Segment& b) {
  const Point2D u = a.end - a.start;
  const Point2D w = b.end - b.start;
  if (u == Point2D{} || w == Point2D{}) return 0.0;
  const double rad = std::atan2(std::abs(cross(u, w)), std::abs(dot(u, w)));
  return rad * 180.0 / std::numbers::pi;
}

inline double point_to_polyline_distance(Point2D pt, const Polyline& p) {
  const auto v = p.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) {
    best = std::min(best, point_segment_distance(pt, v[i - 1], v[i]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Polygons

using Ring = std::vector<Point2D>;  // open ring: last vertex != first

inline double signed_ring_area(std::span<const Point2D> ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    twice += cross(ring[i], ring[(i + 1) % n]);
  }
  return twice / 2.0;
}

/// Polygon with holes. rings[0] is the outer boundary (counter-clockwise),
/// the remaining rings are holes (clockwise).
struct Polygon {
  std::vector<Ring> rings;

  [[nodiscard]] double area() const {
    double a = 0.0;
    for (const auto& r : rings) a += signed_ring_area(r);
    return a;
  }
  [[nodiscard]] BBox bbox() const {
    BBox b;
    if (!rings.empty()) {
      for (const auto& p : rings.front()) b.extend(p);
    }
    return b;
  }
};

using MultiPolygon = std::vector<Polygon>;

/// Drops a closing vertex, removes duplicates and orients rings (outer CCW,
/// holes CW). Throws on rings with fewer than three vertices or zero area.
inline Polygon normalize_polygon(std::vector<Ring> rings) {
  if (rings.empty()) throw GeometryError("polygon has no rings");
  Polygon out;
  for (std::size_t k = 0; k < rings.size(); ++k) {
    Ring r;
    for (const auto& p : rings[k]) {
      if (!is_finite(p)) throw GeometryError("polygon vertex is not finite");
      if (r.empty() || r.back() != p) r.push_back(p);
    }
    while (r.size() > 1 && r.front() == r.back()) r.pop_back();
    if (r.size() < 3 || signed_ring_area(r) == 0.0) {
      throw GeometryError("degenerate polygon ring");
    }
    const bool ccw = signed_ring_area(r) > 0.0;
    if ((k == 0) != ccw) std::reverse(r.begin(), r.end());
    out.rings.push_back(std::move(r));
  }
  return out;
}

inline double area(const MultiPolygon& mp) {
  double a = 0.0;
  for (const auto& p : mp) a += p.area();
  return a;
}

inline BBox bbox(const MultiPolygon& mp) {
  BBox b;
  for (const auto& p : mp) b.extend(p.bbox());
  return b;
}

/// Even-odd containment over all rings.
inline bool contains(const Polygon& poly, Point2D p) {
  bool inside = false;
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const Point2D a = ring[i];
      const Point2D b = ring[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside;
}

inline bool contains(const MultiPolygon& mp, Point2D p) {
  return std::any_of(mp.begin(), mp.end(), [&](const Polygon& poly) { return contains(poly, p); });
}

/// Parameters t in [0,1] along a->b where it meets segment c->d. Collinear
/// overlaps contribute the projections of both overlap ends.
inline void append_crossings(Point2D a, Point2D b, Point2D c, Point2D d, std::vector<double>& out) {
  const Point2D r = b - a;
  const Point2D s = d - c;
  const double denom = cross(r, s);
  const Point2D ac = c - a;
  const double rr = dot(r, r);
  if (rr == 0.0) return;
  if (denom == 0.0) {
    if (cross(ac, r) != 0.0) return;  // parallel, not collinear
    for (Point2D q : {c, d}) {
      const double t = dot(q - a, r) / rr;
      if (t > 0.0 && t < 1.0) out.push_back(t);
    }
    return;
  }
  const double t = cross(ac, s) / denom;
  const double u = cross(ac, r) / denom;
  if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) out.push_back(t);
}

/// Sorted breakpoints in [0,1] where a->b crosses any ring of the polygon,
/// always including 0 and 1.
inline std::vector<double> crossing_params(Point2D a, Point2D b, const Polygon& poly) {
  std::vector<double> ts{0.0, 1.0};
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
      append_crossings(a, b, ring[i], ring[(i + 1) % n], ts);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

/// Length of the part of straight segment a->b inside the polygon.
inline double clipped_length(Point2D a, Point2D b, const Polygon& poly) {
  const auto ts = crossing_params(a, b, poly);
  const double full = distance(a, b);
  double inside = 0.0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (contains(poly, lerp(a, b, (ts[k - 1] + ts[k]) / 2.0))) inside += (ts[k] - ts[k - 1]) * full;
  }
  return inside;
}

inline double clipped_length(const Polyline& line, const Polygon& poly) {
  const auto v = line.vertices();
  double total = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) total += clipped_length(v[i - 1], v[i], poly);
  return total;
}

/// Sutherland-Hodgman clip of an arbitrary ring against a convex CCW ring.
/// The result may contain degenerate spikes but its signed area is exact.
inline Ring clip_to_convex(const Ring& subject, std::span<const Point2D> convex) {
  Ring out = subject;
  for (std::size_t i = 0, n = convex.size(); i < n && !out.empty(); ++i) {
    const Point2D e0 = convex[i];
    const Point2D e1 = convex[(i + 1) % n];
    const Point2D edge = e1 - e0;
    Ring in;
    in.swap(out);
    for (std::size_t k = 0, m = in.size(); k < m; ++k) {
      const Point2D cur = in[k];
      const Point2D prev = in[(k + m - 1) % m];
      const double sc = cross(edge, cur - e0);
      const double sp = cross(edge, prev - e0);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(lerp(prev, cur, sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(lerp(prev, cur, sp / (sp - sc)));
      }
    }
  }
  return out;
}

/// Area of the intersection of a polygon (with holes) and a convex CCW ring.
inline double intersection_area(const Polygon& poly, std::span<const Point2D> convex) {
  double a = 0.0;
  for (const auto& ring : poly.rings) {
    const Ring clipped = clip_to_convex(ring, convex);
    if (clipped.size() >= 3) a += signed_ring_area(clipped);
  }
  return a;
}

} // namespace netqa
