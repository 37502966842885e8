#pragma once

// Planar flat-top hexagonal lattice in axial (q, r) coordinates, anchored at
// the lower-left corner of the study-area bounding box.

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/length_policy.hpp"
#include "netqa/parallel.hpp"

namespace netqa {

inline constexpr double kDefaultCellArea = 740000.0;  // m^2

struct CellId {
  int q = 0;
  int r = 0;

  friend constexpr auto operator<=>(const CellId&, const CellId&) = default;

  [[nodiscard]] std::string str() const { return std::to_string(q) + "_" + std::to_string(r); }

  /// Order-preserving 64-bit key.
  [[nodiscard]] std::uint64_t key() const {
    const auto uq = static_cast<std::uint64_t>(static_cast<std::uint32_t>(q) ^ 0x80000000u);
    const auto ur = static_cast<std::uint64_t>(static_cast<std::uint32_t>(r) ^ 0x80000000u);
    return (uq << 32) | ur;
  }

  static std::optional<CellId> parse(const std::string& s) {
    const auto us = s.find('_', 1);
    if (us == std::string::npos) return std::nullopt;
    try {
      std::size_t n1 = 0, n2 = 0;
      const std::string a = s.substr(0, us), b = s.substr(us + 1);
      const int q = std::stoi(a, &n1);
      const int r = std::stoi(b, &n2);
      if (n1 != a.size() || n2 != b.size()) return std::nullopt;
      return CellId{q, r};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
};

struct HexCell {
  CellId id;
  std::array<Point2D, 6> polygon;  // counter-clockwise
  Point2D centroid;
};

/// Length of one edge falling in one lattice cell. `cell` indexes
/// HexGrid::cells(), or is kNone when the lattice cell was not retained.
struct CellPiece {
  std::size_t cell = kNone;
  CellId id;
  double length = 0.0;
};

class HexGrid {
public:
  HexGrid(Point2D origin, double cell_area) : origin_(origin), cell_area_(cell_area) {
    if (!(cell_area > 0.0) || !std::isfinite(cell_area)) throw GeometryError("cell area must be positive");
    edge_ = std::sqrt(2.0 * cell_area / (3.0 * std::sqrt(3.0)));
  }

  [[nodiscard]] Point2D origin() const { return origin_; }
  [[nodiscard]] double cell_area() const { return cell_area_; }
  [[nodiscard]] double edge_length() const { return edge_; }
  [[nodiscard]] const std::vector<HexCell>& cells() const { return cells_; }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }

  [[nodiscard]] Point2D center(CellId c) const {
    return {origin_.x + edge_ * 1.5 * c.q, origin_.y + edge_ * std::sqrt(3.0) * (c.r + c.q / 2.0)};
  }

  [[nodiscard]] std::array<Point2D, 6> vertices(CellId c) const {
    const Point2D ctr = center(c);
    std::array<Point2D, 6> v;
    for (int k = 0; k < 6; ++k) {
      const double a = std::numbers::pi / 3.0 * k;
      v[k] = {ctr.x + edge_ * std::cos(a), ctr.y + edge_ * std::sin(a)};
    }
    return v;
  }

  /// Lattice cell containing a point (cube-coordinate rounding).
  [[nodiscard]] CellId locate(Point2D p) const {
    const double x = (p.x - origin_.x) / edge_;
    const double y = (p.y - origin_.y) / edge_;
    const double fq = 2.0 / 3.0 * x;
    const double fr = -1.0 / 3.0 * x + std::sqrt(3.0) / 3.0 * y;
    const double fs = -fq - fr;
    double rq = std::round(fq), rr = std::round(fr), rs = std::round(fs);
    const double dq = std::abs(rq - fq), dr = std::abs(rr - fr), ds = std::abs(rs - fs);
    if (dq > dr && dq > ds) {
      rq = -rr - rs;
    } else if (dr > ds) {
      rr = -rq - rs;
    }
    return {static_cast<int>(rq), static_cast<int>(rr)};
  }

  /// Index of a retained cell.
  [[nodiscard]] std::optional<std::size_t> find(CellId c) const {
    const auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Every lattice cell whose hexagon can overlap the box.
  [[nodiscard]] std::vector<CellId> lattice_cells(const BBox& b) const {
    const double h = std::sqrt(3.0) * edge_;
    const int q0 = static_cast<int>(std::floor((b.min_x - origin_.x - edge_) / (1.5 * edge_))) - 1;
    const int q1 = static_cast<int>(std::ceil((b.max_x - origin_.x + edge_) / (1.5 * edge_))) + 1;
    std::vector<CellId> out;
    for (int q = q0; q <= q1; ++q) {
      const int r0 = static_cast<int>(std::floor((b.min_y - origin_.y - h / 2.0) / h - q / 2.0)) - 1;
      const int r1 = static_cast<int>(std::ceil((b.max_y - origin_.y + h / 2.0) / h - q / 2.0)) + 1;
      for (int r = r0; r <= r1; ++r) out.push_back({q, r});
    }
    return out;
  }

  void add_cell(CellId c) {
    if (index_.count(c)) return;
    HexCell cell{c, vertices(c), center(c)};
    index_.emplace(c, cells_.size());
    cells_.push_back(cell);
  }

  /// Restores ascending id order after cells were added.
  void finalize() {
    std::sort(cells_.begin(), cells_.end(), [](const HexCell& a, const HexCell& b) { return a.id < b.id; });
    index_.clear();
    for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(cells_[i].id, i);
  }

  /// Splits straight segment a->b at hexagon boundaries; each piece goes to
  /// the lattice cell containing its midpoint, so pieces never double count.
  void append_pieces(Point2D a, Point2D b, std::vector<CellPiece>& out) const {
    const double full = distance(a, b);
    if (full == 0.0) return;
    BBox box;
    box.extend(a);
    box.extend(b);
    std::vector<double> ts{0.0, 1.0};
    for (const CellId c : lattice_cells(box)) {
      const auto v = vertices(c);
      for (std::size_t k = 0; k < 6; ++k) append_crossings(a, b, v[k], v[(k + 1) % 6], ts);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const double len = (ts[k] - ts[k - 1]) * full;
      if (len <= 0.0) continue;
      const CellId id = locate(lerp(a, b, (ts[k - 1] + ts[k]) / 2.0));
      if (!out.empty() && out.back().id == id) {
        out.back().length += len;
      } else {
        const auto idx = find(id);
        out.push_back({idx ? *idx : kNone, id, len});
      }
    }
  }

  /// Per-cell lengths of a polyline, one entry per distinct lattice cell in
  /// order of first visit.
  [[nodiscard]] std::vector<CellPiece> pieces(const Polyline& line) const {
    std::vector<CellPiece> raw;
    const auto v = line.vertices();
    for (std::size_t i = 1; i < v.size(); ++i) append_pieces(v[i - 1], v[i], raw);
    std::vector<CellPiece> merged;
    for (const auto& p : raw) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const CellPiece& m) { return m.id == p.id; });
      if (it == merged.end()) {
        merged.push_back(p);
      } else {
        it->length += p.length;
      }
    }
    return merged;
  }

private:
  Point2D origin_;
  double cell_area_;
  double edge_ = 0.0;
  std::vector<HexCell> cells_;
  std::map<CellId, std::size_t> index_;
};

/// Regular hexagons of `cell_area` m^2 covering the study area; a cell is
/// kept when its overlap with the study area has positive area.
inline HexGrid build_grid(const MultiPolygon& study_area, double cell_area = kDefaultCellArea) {
  const double total = area(study_area);
  if (study_area.empty() || !(total > 0.0)) throw GeometryError("study area is degenerate (zero area)");
  const BBox b = bbox(study_area);
  HexGrid grid({b.min_x, b.min_y}, cell_area);
  const double min_overlap = 1e-9 * cell_area;
  for (const CellId c : grid.lattice_cells(b)) {
    const auto hex = grid.vertices(c);
    double overlap = 0.0;
    for (const auto& poly : study_area) overlap += intersection_area(poly, hex);
    if (overlap > min_overlap) grid.add_cell(c);
  }
  grid.finalize();
  return grid;
}

struct CellLengths {
  std::vector<double> per_cell;  // aligned with grid.cells()
  std::vector<bool> touched;     // cell received any length
  double outside = 0.0;
  double total = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] double assigned() const {
    double s = 0.0;
    for (double v : per_cell) s += v;
    return s;
  }
};

/// Clips every edge into grid cells and accumulates infrastructure length.
/// Lengths in lattice cells outside the grid go to `outside`. Reduction runs
/// in edge order regardless of `threads`.
inline CellLengths assign_lengths(const std::vector<NetworkEdge>& edges, const HexGrid& grid,
                                  const LengthPolicy& policy, unsigned threads = 1) {
  std::vector<std::vector<CellPiece>> pieces(edges.size());
  parallel_for(edges.size(), threads, [&](std::size_t i) { pieces[i] = grid.pieces(edges[i].geometry); });

  CellLengths out;
  out.per_cell.assign(grid.size(), 0.0);
  out.touched.assign(grid.size(), false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double factor = policy.factor(edges[i].cls);
    out.total += infrastructure_length(edges[i], policy);
    for (const auto& p : pieces[i]) {
      if (p.cell == kNone) {
        out.outside += p.length * factor;
      } else {
        out.per_cell[p.cell] += p.length * factor;
        out.touched[p.cell] = true;
      }
    }
  }
  if (out.outside > 0.0) {
    out.warnings.push_back(std::to_string(out.outside) + " m of infrastructure lies outside the grid");
  }
  return out;
}

} // namespace netqa
