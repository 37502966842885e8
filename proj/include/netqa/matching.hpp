#pragma once

// Segment-level feature matching between two datasets.

#include <algorithm>
#include <optional>
#include <vector>

#include <json.hpp>

#include "netqa/completeness.hpp"
#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/parallel.hpp"
#include "netqa/spatial_index.hpp"

namespace netqa {

struct MatchConfig {
  double seg_len = 10.0;        // m
  double max_dist = 15.0;       // m, between segment midpoints
  double max_hausdorff = 17.0;  // m
  double max_angle = 30.0;      // degrees

  void validate() const {
    if (!(seg_len > 0.0 && max_dist > 0.0 && max_hausdorff > 0.0 && max_angle > 0.0)) {
      throw ConfigError("matching thresholds must all be > 0");
    }
    if (max_hausdorff < max_dist) throw ConfigError("max_hausdorff must be >= max_dist");
  }

  static MatchConfig from_json(const nlohmann::json& j) {
    MatchConfig c;
    if (!j.is_null()) {
      c.seg_len = j.value("seg_len", c.seg_len);
      c.max_dist = j.value("max_dist", c.max_dist);
      c.max_hausdorff = j.value("max_hausdorff", c.max_hausdorff);
      c.max_angle = j.value("max_angle", c.max_angle);
    }
    c.validate();
    return c;
  }

  [[nodiscard]] nlohmann::json to_json() const {
    return {{"seg_len", seg_len}, {"max_dist", max_dist}, {"max_hausdorff", max_hausdorff}, {"max_angle", max_angle}};
  }
};

struct MatchScore {
  double midpoint_dist = 0.0;
  double hausdorff = 0.0;
  double angle = 0.0;
  double composite = 0.0;
};

/// Scores a candidate pair, or nullopt if any threshold is exceeded.
/// composite = hausdorff + midpoint distance + (angle / max_angle) * max_dist.
inline std::optional<MatchScore> evaluate_pair(const Segment& a, const Segment& b, const MatchConfig& cfg) {
  MatchScore s;
  s.midpoint_dist = distance(a.midpoint(), b.midpoint());
  if (s.midpoint_dist > cfg.max_dist) return std::nullopt;
  s.angle = segment_angle_deg(a, b);
  if (s.angle > cfg.max_angle) return std::nullopt;
  s.hausdorff = hausdorff_distance(a, b);
  if (s.hausdorff > cfg.max_hausdorff) return std::nullopt;
  s.composite = s.hausdorff + s.midpoint_dist + (s.angle / cfg.max_angle) * cfg.max_dist;
  return s;
}

struct MatchRecord {
  std::size_t segment = 0;
  std::optional<std::size_t> matched;
  MatchScore score;  // meaningful only when matched

  friend bool operator==(const MatchRecord& a, const MatchRecord& b) {
    if (a.segment != b.segment || a.matched != b.matched) return false;
    if (!a.matched) return true;
    return a.score.midpoint_dist == b.score.midpoint_dist && a.score.hausdorff == b.score.hausdorff &&
           a.score.angle == b.score.angle && a.score.composite == b.score.composite;
  }
};

/// Segments of every edge; parent_edge is the index into `edges`.
inline std::vector<Segment> segmentize_edges(const std::vector<NetworkEdge>& edges, double seg_len) {
  std::vector<Segment> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto s = segmentize(edges[e].geometry, seg_len, e);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

/// Best counterpart in `to` for every segment of `from`. Candidates come from
/// an R-tree over `to`; any segment whose midpoint is within max_dist has a
/// bounding box meeting the query box, so no passing pair is missed.
inline std::vector<MatchRecord> match_segments(const std::vector<Segment>& from, const std::vector<Segment>& to,
                                               const MatchConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  std::vector<BBox> boxes;
  boxes.reserve(to.size());
  for (const auto& s : to) boxes.push_back(s.bbox());
  const BoxIndex index(boxes);

  std::vector<MatchRecord> out(from.size());
  parallel_for(from.size(), threads, [&](std::size_t i) {
    MatchRecord rec{i, std::nullopt, {}};
    for (std::size_t j : index.query(from[i].bbox().expanded(cfg.max_dist))) {
      const auto s = evaluate_pair(from[i], to[j], cfg);
      if (s && (!rec.matched || s->composite < rec.score.composite)) {
        rec.matched = j;
        rec.score = *s;
      }
    }
    out[i] = rec;
  });
  return out;
}

struct MatchResult {
  std::vector<Segment> segments_a, segments_b;
  std::vector<MatchRecord> records_a, records_b;  // a->b and b->a
};

/// Matches in both directions independently; the two relations need not
/// agree.
inline MatchResult match_datasets(const std::vector<NetworkEdge>& a, const std::vector<NetworkEdge>& b,
                                  const MatchConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  MatchResult r;
  r.segments_a = segmentize_edges(a, cfg.seg_len);
  r.segments_b = segmentize_edges(b, cfg.seg_len);
  r.records_a = match_segments(r.segments_a, r.segments_b, cfg, threads);
  r.records_b = match_segments(r.segments_b, r.segments_a, cfg, threads);
  return r;
}

struct MatchSummary {
  std::size_t segment_count = 0;
  std::size_t matched_count = 0;
  double total_length = 0.0;    // m
  double matched_length = 0.0;  // m
  CellValues cell_pct;          // % of segment length matched, by segment midpoint

  [[nodiscard]] double pct_count() const {
    return segment_count ? 100.0 * static_cast<double>(matched_count) / static_cast<double>(segment_count) : 0.0;
  }
  [[nodiscard]] double pct_length() const { return total_length > 0.0 ? 100.0 * matched_length / total_length : 0.0; }
};

inline MatchSummary match_summary(const std::vector<MatchRecord>& records, const std::vector<Segment>& segments,
                                  const HexGrid& grid) {
  if (records.size() != segments.size()) throw Error("match_summary: records and segments differ in size");
  MatchSummary s;
  s.segment_count = segments.size();
  std::vector<double> cell_total(grid.size(), 0.0), cell_matched(grid.size(), 0.0);
  std::vector<bool> occupied(grid.size(), false);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double len = segments[i].length;
    const bool hit = records[i].matched.has_value();
    s.total_length += len;
    if (hit) {
      ++s.matched_count;
      s.matched_length += len;
    }
    if (const auto c = grid.find(grid.locate(segments[i].midpoint()))) {
      occupied[*c] = true;
      cell_total[*c] += len;
      if (hit) cell_matched[*c] += len;
    }
  }
  s.cell_pct.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (occupied[c] && cell_total[c] > 0.0) s.cell_pct[c] = std::min(100.0, 100.0 * cell_matched[c] / cell_total[c]);
  }
  return s;
}

} // namespace netqa
