#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using fixture::edge;
using netqa::MatchConfig;
using netqa::Point2D;

namespace {

/// Horizontal streets at y = 0, spacing, ... and vertical ones likewise.
std::vector<netqa::NetworkEdge> street_grid(int n, double spacing, double dx = 0.0, double dy = 0.0,
                                            bool horizontal = true, bool vertical = true) {
  std::vector<netqa::NetworkEdge> out;
  const double extent = spacing * (n - 1);
  for (int i = 0; i < n; ++i) {
    const double c = spacing * i;
    if (horizontal) out.push_back(edge("h" + std::to_string(i), {{dx, c + dy}, {extent + dx, c + dy}}));
    if (vertical) out.push_back(edge("v" + std::to_string(i), {{c + dx, dy}, {c + dx, extent + dy}}));
  }
  return out;
}

std::vector<netqa::NetworkEdge> translated(std::vector<netqa::NetworkEdge> edges, Point2D by) {
  for (auto& e : edges) {
    std::vector<Point2D> v;
    for (const auto& p : e.geometry.vertices()) v.push_back(p + by);
    e.geometry = netqa::Polyline(v);
  }
  return edges;
}

std::size_t matched_count(const std::vector<netqa::MatchRecord>& r) {
  std::size_t n = 0;
  for (const auto& x : r) n += x.matched.has_value();
  return n;
}

} // namespace

TEST(MatchConfig, Validation) {
  EXPECT_NO_THROW(MatchConfig{}.validate());
  EXPECT_THROW((MatchConfig{10, 15, 14, 30}.validate()), netqa::ConfigError);
  EXPECT_THROW((MatchConfig{0, 15, 17, 30}.validate()), netqa::ConfigError);
  EXPECT_THROW((MatchConfig{10, 15, 17, -1}.validate()), netqa::ConfigError);
  const auto c = MatchConfig::from_json(netqa::json::parse(R"({"max_dist": 12})"));
  EXPECT_EQ(c.max_dist, 12.0);
  EXPECT_EQ(c.max_hausdorff, 17.0);
}

TEST(EvaluatePair, ScoreAndThresholds) {
  const MatchConfig cfg;
  const netqa::Segment a{{0, 0}, {10, 0}, 0, 0, 10};
  const netqa::Segment b{{0, 3}, {10, 3}, 0, 0, 10};
  const auto s = netqa::evaluate_pair(a, b, cfg);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->composite, 6.0);
  const netqa::Segment tilted{{0, 0}, {10 * std::cos(0.6), 10 * std::sin(0.6)}, 0, 0, 10};  // ~34 degrees
  EXPECT_FALSE(netqa::evaluate_pair(a, tilted, cfg));
  const netqa::Segment far{{0, 16}, {10, 16}, 0, 0, 10};
  EXPECT_FALSE(netqa::evaluate_pair(a, far, cfg));
}

TEST(MatchDatasets, SelfMatchPairsEachSegmentWithItsTwin) {
  const auto streets = street_grid(6, 100.0);
  const auto r = netqa::match_datasets(streets, streets, {});
  ASSERT_EQ(r.segments_a.size(), r.segments_b.size());
  ASSERT_FALSE(r.records_a.empty());
  for (const auto& rec : r.records_a) {
    ASSERT_TRUE(rec.matched);
    EXPECT_EQ(*rec.matched, rec.segment);
    EXPECT_EQ(rec.score.composite, 0.0);
  }
  for (const auto& rec : r.records_b) EXPECT_EQ(rec.matched, rec.segment);
}

TEST(MatchDatasets, SelfMatchOfRandomNetworkIsComplete) {
  std::mt19937_64 rng(21);
  const auto edges = fixture::random_edges(rng, 80, 1500.0);
  const auto r = netqa::match_datasets(edges, edges, {});
  EXPECT_EQ(matched_count(r.records_a), r.records_a.size());
  EXPECT_EQ(matched_count(r.records_b), r.records_b.size());
  for (const auto& rec : r.records_a) EXPECT_NEAR(rec.score.composite, 0.0, 1e-9);
}

TEST(MatchDatasets, ParallelLinesBeyondThreshold) {
  const auto r = netqa::match_datasets({edge("a", {{0, 0}, {500, 0}})}, {edge("b", {{0, 20}, {500, 20}})}, {});
  EXPECT_EQ(matched_count(r.records_a), 0u);
  EXPECT_EQ(matched_count(r.records_b), 0u);
}

TEST(MatchDatasets, EmptyInputs) {
  const auto r = netqa::match_datasets({}, {edge("b", {{0, 20}, {500, 20}})}, {});
  EXPECT_TRUE(r.records_a.empty());
  EXPECT_EQ(r.records_b.size(), 50u);
  EXPECT_EQ(matched_count(r.records_b), 0u);
}

TEST(MatchDatasets, OnlyParallelStreetsMatchAcrossOffsetGrid) {
  // A: horizontal streets only. B: the full grid shifted 5 m north.
  const auto a = street_grid(3, 100.0, 0.0, 0.0, true, false);
  const auto b = street_grid(3, 100.0, 0.0, 5.0);
  const MatchConfig cfg;
  const auto sa = netqa::segmentize_edges(a, cfg.seg_len), sb = netqa::segmentize_edges(b, cfg.seg_len);
  ASSERT_LE(sa.size(), 200u);
  ASSERT_LE(sb.size(), 200u);
  const auto ab = netqa::match_segments(sa, sb, cfg);
  const auto ba = netqa::match_segments(sb, sa, cfg);
  EXPECT_EQ(ab, oracle::brute_match(sa, sb, cfg));
  EXPECT_EQ(ba, oracle::brute_match(sb, sa, cfg));

  EXPECT_EQ(matched_count(ab), sa.size());
  for (const auto& rec : ab) {
    ASSERT_TRUE(rec.matched);
    EXPECT_EQ(rec.score.angle, 0.0);
    EXPECT_EQ(b[sb[*rec.matched].parent_edge].id[0], 'h');
  }
  for (const auto& rec : ba) {
    const bool horizontal = b[sb[rec.segment].parent_edge].id[0] == 'h';
    EXPECT_EQ(rec.matched.has_value(), horizontal);
  }
}

TEST(MatchDatasets, IndexedMatcherEqualsBruteForceOnRandomFixtures) {
  std::mt19937_64 rng(404);
  const MatchConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    auto a = fixture::random_edges(rng, 12, 400.0, 5, 60.0);
    auto b = fixture::random_edges(rng, 12, 400.0, 5, 60.0);
    // half of B follows A with a small jitter so that matches exist
    std::normal_distribution<double> jitter(0.0, 3.0);
    for (std::size_t i = 0; i < b.size() / 2; ++i) {
      std::vector<Point2D> v;
      for (const auto& p : a[i].geometry.vertices()) v.push_back({p.x + jitter(rng), p.y + jitter(rng)});
      b[i].geometry = netqa::Polyline(v);
    }
    auto sa = netqa::segmentize_edges(a, cfg.seg_len), sb = netqa::segmentize_edges(b, cfg.seg_len);
    sa.resize(std::min<std::size_t>(sa.size(), 200));
    sb.resize(std::min<std::size_t>(sb.size(), 200));
    const auto ab = netqa::match_segments(sa, sb, cfg);
    EXPECT_EQ(ab, oracle::brute_match(sa, sb, cfg)) << "trial " << trial;
    EXPECT_EQ(netqa::match_segments(sb, sa, cfg), oracle::brute_match(sb, sa, cfg)) << "trial " << trial;
    EXPECT_GT(matched_count(ab), 0u);
  }
}

TEST(MatchDatasets, RecordsRespectThresholds) {
  std::mt19937_64 rng(9);
  const auto a = fixture::random_edges(rng, 100, 1000.0), b = fixture::random_edges(rng, 100, 1000.0);
  const MatchConfig cfg;
  const auto r = netqa::match_datasets(a, b, cfg);
  std::size_t hits = 0;
  for (const auto& rec : r.records_a) {
    if (!rec.matched) continue;
    ++hits;
    EXPECT_LE(rec.score.midpoint_dist, cfg.max_dist);
    EXPECT_LE(rec.score.hausdorff, cfg.max_hausdorff);
    EXPECT_LE(rec.score.angle, cfg.max_angle);
    const auto& s = r.segments_a[rec.segment];
    const auto& t = r.segments_b[*rec.matched];
    EXPECT_EQ(rec.score.hausdorff, netqa::hausdorff_distance(s, t));
  }
  EXPECT_GT(hits, 0u);
}

TEST(MatchDatasets, ShrinkingThresholdsNeverAddsMatches) {
  std::mt19937_64 rng(10);
  const auto a = fixture::random_edges(rng, 100, 1000.0), b = fixture::random_edges(rng, 100, 1000.0);
  const MatchConfig base;
  const auto n0 = matched_count(netqa::match_datasets(a, b, base).records_a);
  for (const MatchConfig smaller : {MatchConfig{10, 10, 17, 30}, MatchConfig{10, 15, 15, 30},
                                    MatchConfig{10, 15, 17, 10}, MatchConfig{10, 5, 6, 5}}) {
    EXPECT_LE(matched_count(netqa::match_datasets(a, b, smaller).records_a), n0);
  }
}

TEST(MatchDatasets, TranslationInvariant) {
  std::mt19937_64 rng(11);
  const auto a = fixture::random_edges(rng, 80, 1000.0), b = fixture::random_edges(rng, 80, 1000.0);
  const Point2D shift{1234.5, -678.25};
  const auto r0 = netqa::match_datasets(a, b, {});
  const auto r1 = netqa::match_datasets(translated(a, shift), translated(b, shift), {});
  EXPECT_EQ(matched_count(r0.records_a), matched_count(r1.records_a));
  EXPECT_EQ(matched_count(r0.records_b), matched_count(r1.records_b));
}

TEST(MatchDatasets, ThreadCountDoesNotChangeRecords) {
  std::mt19937_64 rng(12);
  const auto a = fixture::random_edges(rng, 150, 1500.0), b = fixture::random_edges(rng, 150, 1500.0);
  const auto r1 = netqa::match_datasets(a, b, {}, 1);
  const auto r4 = netqa::match_datasets(a, b, {}, 4);
  EXPECT_EQ(r1.records_a, r4.records_a);
  EXPECT_EQ(r1.records_b, r4.records_b);
}

TEST(MatchSummary, HalfMatchedInOneCell) {
  const auto grid = netqa::build_grid(fixture::rectangle(0, 0, 5000, 5000), 740000.0);
  const Point2D c = grid.center(grid.locate({2500, 2500}));
  const auto segs = netqa::segmentize(netqa::Polyline({{c.x - 50, c.y}, {c.x + 50, c.y}}), 10.0);
  ASSERT_EQ(segs.size(), 10u);
  std::vector<netqa::MatchRecord> recs;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    recs.push_back({i, i % 2 ? std::optional<std::size_t>(0) : std::nullopt, {}});
  }
  const auto s = netqa::match_summary(recs, segs, grid);
  EXPECT_DOUBLE_EQ(s.pct_count(), 50.0);
  EXPECT_DOUBLE_EQ(s.pct_length(), 50.0);
  std::size_t occupied = 0;
  for (const auto& v : s.cell_pct) {
    if (v) {
      ++occupied;
      EXPECT_DOUBLE_EQ(*v, 50.0);
    }
  }
  EXPECT_EQ(occupied, 1u);
}

TEST(MatchSummary, SixOfTenOverlapping) {
  // Ten 10 m pieces in A: six run 2 m from B, then A turns north away from it.
  const auto a = {edge("a", {{0, 0}, {60, 0}, {60, 40}})};
  const auto b = {edge("b", {{0, 2}, {60, 2}}), edge("c", {{60, 300}, {100, 300}})};
  const auto r = netqa::match_datasets(a, b, {});
  const auto grid = netqa::build_grid(fixture::rectangle(-50, -50, 150, 350), 40000.0);
  const auto s = netqa::match_summary(r.records_a, r.segments_a, grid);
  EXPECT_EQ(s.segment_count, 10u);
  EXPECT_EQ(s.matched_count, 6u);
  EXPECT_DOUBLE_EQ(s.pct_count(), 60.0);
  EXPECT_NEAR(s.pct_length(), 60.0, 1e-9);
  const auto sb = netqa::match_summary(r.records_b, r.segments_b, grid);
  EXPECT_DOUBLE_EQ(sb.pct_count(), 60.0);  // 6 of the 10 B pieces lie on A
  EXPECT_LE(s.matched_length, s.total_length);
  EXPECT_LE(sb.matched_length, sb.total_length);
}

TEST(MatchSummary, AllMatchedEverywhere) {
  std::mt19937_64 rng(13);
  const auto edges = fixture::random_edges(rng, 60, 2000.0);
  const auto grid = netqa::build_grid(fixture::rectangle(0, 0, 2000, 2000), 40000.0);
  const auto r = netqa::match_datasets(edges, edges, {});
  const auto s = netqa::match_summary(r.records_a, r.segments_a, grid);
  EXPECT_DOUBLE_EQ(s.pct_length(), 100.0);
  for (const auto& v : s.cell_pct) {
    if (v) {
      EXPECT_DOUBLE_EQ(*v, 100.0);
    }
  }
  EXPECT_THROW(netqa::match_summary({}, r.segments_a, grid), netqa::Error);
}
