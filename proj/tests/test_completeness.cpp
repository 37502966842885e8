#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using fixture::edge;
using netqa::CellValues;
using netqa::Point2D;

namespace {

netqa::DensitySurface surface(const netqa::HexGrid& grid, CellValues density, std::string name = "x") {
  return {std::move(name), grid.origin(), grid.cell_area(), grid.size(), std::move(density)};
}

std::vector<std::vector<Point2D>> rings_of(const netqa::MultiPolygon& mp) { return mp.at(0).rings; }

} // namespace

TEST(InfrastructureLength, CenterlineBidirectionalCountsTwice) {
  const netqa::LengthPolicy policy;
  EXPECT_EQ(netqa::infrastructure_length(edge("a", {{0, 0}, {100, 0}}, fixture::centerline_both()), policy), 200.0);
  EXPECT_EQ(netqa::infrastructure_length(edge("b", {{0, 0}, {100, 0}}, fixture::separate()), policy), 100.0);
  const netqa::Classification centre_oneway{netqa::InfraCategory::Unprotected, netqa::MappingModel::Centerline,
                                            netqa::Directionality::Oneway};
  EXPECT_EQ(netqa::infrastructure_length(edge("c", {{0, 0}, {60, 80}}, centre_oneway), policy), 100.0);
}

TEST(InfrastructureLength, MissingPolicyEntryIsAConfigError) {
  auto policy = netqa::LengthPolicy::empty();
  policy.set(netqa::MappingModel::SeparateGeometry, netqa::Directionality::Oneway, 1.0);
  EXPECT_NO_THROW(netqa::infrastructure_length(edge("a", {{0, 0}, {1, 0}}), policy));
  EXPECT_THROW(netqa::infrastructure_length(edge("b", {{0, 0}, {1, 0}}, fixture::centerline_both()), policy),
               netqa::ConfigError);
  EXPECT_THROW(policy.set(netqa::MappingModel::Centerline, netqa::Directionality::Oneway, 0.5), netqa::ConfigError);
}

TEST(InfrastructureLength, PolicyFromJsonOverridesDefaults) {
  const auto p = netqa::LengthPolicy::from_json(netqa::json::parse(R"({"centerline/bidirectional": 1.5})"));
  EXPECT_EQ(p.factor(fixture::centerline_both()), 1.5);
  EXPECT_EQ(p.factor(fixture::separate()), 1.0);
  EXPECT_THROW(netqa::LengthPolicy::from_json(netqa::json::parse(R"({"centerline": 2})")), netqa::ConfigError);
}

TEST(LengthTotals, MixedDatasetMatchesPerEdgeSum) {
  std::mt19937_64 rng(31);
  const auto edges = fixture::random_edges(rng, 120, 2000.0);
  const netqa::LengthPolicy policy;
  double infra = 0.0, geometric = 0.0, prot = 0.0;
  for (const auto& e : edges) {
    const std::vector<Point2D> v(e.geometry.vertices().begin(), e.geometry.vertices().end());
    const double len = oracle::pairwise_length(v);
    const double f = e.cls.mapping == netqa::MappingModel::Centerline &&
                             e.cls.direction == netqa::Directionality::Bidirectional
                         ? 2.0
                         : 1.0;
    geometric += len;
    infra += len * f;
    if (e.cls.category == netqa::InfraCategory::Protected) prot += len * f;
  }
  const auto t = netqa::length_totals(edges, policy);
  EXPECT_NEAR(t.geometric, geometric, 1e-9 * geometric);
  EXPECT_NEAR(t.infrastructure, infra, 1e-9 * infra);
  EXPECT_NEAR(t.protected_length, prot, 1e-9 * infra);
  EXPECT_NEAR(t.protected_length + t.unprotected_length, t.infrastructure, 1e-9 * infra);
}

TEST(DensityDifference, Examples) {
  const auto grid = netqa::build_grid(fixture::rectangle(0, 0, 600, 600), 40000.0);
  ASSERT_GE(grid.size(), 4u);
  CellValues osm(grid.size()), ref(grid.size());
  osm[0] = 2.0;
  ref[0] = 0.5;
  ref[1] = 1.0;
  osm[2] = 0.75;
  const auto d = netqa::density_difference(surface(grid, osm, "osm"), surface(grid, ref, "ref"));
  EXPECT_DOUBLE_EQ(*d[0], -1.5);
  EXPECT_DOUBLE_EQ(*d[1], 1.0);
  EXPECT_DOUBLE_EQ(*d[2], -0.75);
  EXPECT_FALSE(d[3].has_value());

  for (const auto& v : netqa::density_difference(surface(grid, osm), surface(grid, osm))) {
    if (v) {
      EXPECT_EQ(*v, 0.0);
    }
  }
}

TEST(DensityDifference, AntisymmetricOnRandomSurfaces) {
  const auto grid = netqa::build_grid(fixture::rectangle(0, 0, 2000, 2000), 40000.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::bernoulli_distribution present(0.6);
  CellValues a(grid.size()), b(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (present(rng)) a[c] = u(rng);
    if (present(rng)) b[c] = u(rng);
  }
  const auto ab = netqa::density_difference(surface(grid, a), surface(grid, b));
  const auto ba = netqa::density_difference(surface(grid, b), surface(grid, a));
  for (std::size_t c = 0; c < grid.size(); ++c) {
    ASSERT_EQ(ab[c].has_value(), ba[c].has_value());
    EXPECT_EQ(ab[c].has_value(), a[c].has_value() || b[c].has_value());
    if (ab[c]) {
      EXPECT_EQ(*ab[c], -*ba[c]);
    }
  }
}

TEST(DensityDifference, GridMismatchRejected) {
  const auto g1 = netqa::build_grid(fixture::rectangle(0, 0, 600, 600), 40000.0);
  const auto g2 = netqa::build_grid(fixture::rectangle(0, 0, 600, 600), 50000.0);
  EXPECT_THROW(netqa::density_difference(surface(g1, CellValues(g1.size())), surface(g2, CellValues(g2.size()))),
               netqa::Error);
}

TEST(DensitySurface, UnitsAreKilometresPerSquareKilometre) {
  const auto grid = netqa::build_grid(fixture::rectangle(0, 0, 5000, 5000), 740000.0);
  const auto id = grid.locate({2500, 2500});
  const Point2D c = grid.center(id);
  const auto lengths = netqa::assign_lengths({edge("e", {{c.x - 100, c.y}, {c.x + 100, c.y}})}, grid, {});
  const auto s = netqa::density_surface(lengths, grid, "x");
  // 0.2 km in 0.74 km^2
  EXPECT_NEAR(*s.density[*grid.find(id)], 0.2 / 0.74, 1e-12);
  std::size_t non_null = 0;
  for (const auto& v : s.density) non_null += v.has_value();
  EXPECT_EQ(non_null, 1u);
}

TEST(PolygonAggregate, SinglePolygonEqualsGlobalTotals) {
  std::mt19937_64 rng(5);
  const auto a = fixture::random_edges(rng, 60, 1000.0);
  const auto b = fixture::random_edges(rng, 40, 1000.0);
  const netqa::LengthPolicy policy;
  const std::vector<netqa::NamedPolygon> polys{{"all", fixture::rectangle(-1, -1, 1001, 1001)}};
  const auto agg = netqa::polygon_aggregate(a, b, polys, policy);
  ASSERT_EQ(agg.rows.size(), 1u);
  const double ta = netqa::length_totals(a, policy).infrastructure, tb = netqa::length_totals(b, policy).infrastructure;
  EXPECT_NEAR(agg.rows[0].length_a, ta, 1e-9 * ta);
  EXPECT_NEAR(agg.rows[0].length_b, tb, 1e-9 * tb);
  EXPECT_NEAR(agg.rows[0].density_a, ta / agg.rows[0].area * 1000.0, 1e-12);
  EXPECT_NEAR(*agg.rows[0].relative_difference, (tb - ta) / std::max(ta, tb), 1e-12);
  EXPECT_TRUE(agg.warnings.empty());
}

TEST(PolygonAggregate, StraddlingEdgeSplitsEvenly) {
  const std::vector<netqa::NamedPolygon> polys{{"west", fixture::rectangle(0, 0, 100, 100)},
                                               {"east", fixture::rectangle(100, 0, 200, 100)}};
  const auto agg = netqa::polygon_aggregate({edge("a", {{50, 50}, {150, 50}})}, {}, polys, {});
  EXPECT_NEAR(agg.rows[0].length_a, 50.0, 1e-9);
  EXPECT_NEAR(agg.rows[1].length_a, 50.0, 1e-9);
  EXPECT_EQ(agg.rows[0].length_b, 0.0);
  EXPECT_NEAR(*agg.rows[0].relative_difference, -1.0, 1e-12);
  EXPECT_TRUE(agg.warnings.empty());  // a shared side is not an overlap
}

TEST(PolygonAggregate, EmptyPolygonHasNoRelativeDifference) {
  const std::vector<netqa::NamedPolygon> polys{{"p", fixture::rectangle(0, 0, 10, 10)}};
  EXPECT_FALSE(netqa::polygon_aggregate({}, {}, polys, {}).rows[0].relative_difference.has_value());
}

TEST(PolygonAggregate, OverlapWarns) {
  const std::vector<netqa::NamedPolygon> polys{{"a", fixture::rectangle(0, 0, 100, 100)},
                                               {"b", fixture::rectangle(50, 50, 150, 150)}};
  const auto agg = netqa::polygon_aggregate({edge("e", {{60, 60}, {90, 90}})}, {}, polys, {});
  ASSERT_EQ(agg.warnings.size(), 1u);
  EXPECT_NEAR(agg.rows[0].length_a, agg.rows[1].length_a, 1e-9);
}

TEST(PolygonAggregate, ThreePolygonsMatchDiscretization) {
  std::mt19937_64 rng(77);
  const auto edges = fixture::random_edges(rng, 150, 3000.0, 6, 250.0);
  // An L-shape, a triangle and the remainder, partitioning [-100,3100]^2. The margin keeps the
  // clamped walks off the outer boundary.
  const std::vector<Point2D> l_shape{{-100, -100}, {1500, -100}, {1500, 1000}, {1000, 1000}, {1000, 3100}, {-100, 3100}};
  const std::vector<Point2D> triangle{{1500, -100}, {3100, -100}, {3100, 1500}};
  const std::vector<Point2D> rest{{1500, 1000}, {1500, -100}, {3100, 1500}, {3100, 3100}, {1000, 3100}, {1000, 1000}};
  const std::vector<netqa::NamedPolygon> polys{{"L", {netqa::normalize_polygon({l_shape})}},
                                               {"T", {netqa::normalize_polygon({triangle})}},
                                               {"R", {netqa::normalize_polygon({rest})}}};
  const netqa::LengthPolicy policy;
  const auto agg = netqa::polygon_aggregate(edges, {}, polys, policy);
  EXPECT_TRUE(agg.warnings.empty());

  std::vector<std::vector<std::vector<Point2D>>> rings;
  for (const auto& p : polys) rings.push_back(rings_of(p.geometry));
  const auto expected = oracle::discretized_polygon_lengths(edges, rings, policy);
  double sum = 0.0;
  for (std::size_t p = 0; p < polys.size(); ++p) {
    EXPECT_NEAR(agg.rows[p].length_a, expected[p], 0.005 * expected[p]) << polys[p].name;
    sum += agg.rows[p].length_a;
  }
  EXPECT_NEAR(agg.rows[0].area + agg.rows[1].area + agg.rows[2].area, 3200.0 * 3200.0, 1e-6);
  const double total = netqa::length_totals(edges, policy).infrastructure;
  EXPECT_NEAR(sum, total, 1e-3 * total);
}

TEST(Correlate, LinearExamples) {
  CellValues a, b, c;
  for (int i = 0; i < 20; ++i) {
    a.push_back(i * 0.37 + (i % 3));
    b.push_back(2.0 * *a.back());
    c.push_back(-*a.back());
  }
  EXPECT_NEAR(netqa::correlate(a, b), 1.0, 1e-12);
  EXPECT_NEAR(netqa::correlate(a, c), -1.0, 1e-12);
  EXPECT_NEAR(netqa::correlate(a, b, netqa::Correlation::Spearman), 1.0, 1e-12);
  EXPECT_NEAR(netqa::correlate(a, c, netqa::Correlation::Spearman), -1.0, 1e-12);
}

TEST(Correlate, RandomCellsMatchTextbookFormula) {
  std::mt19937_64 rng(100);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 6);
  CellValues a, b;
  std::vector<double> x, y, xi, yi;
  for (int i = 0; i < 130; ++i) {
    const double u = g(rng), v = 0.4 * u + g(rng);
    const bool drop = i >= 100;  // 30 incomplete pairs, excluded pairwise
    a.push_back(u);
    b.push_back(drop ? std::nullopt : std::optional<double>(v));
    if (!drop) {
      x.push_back(u);
      y.push_back(v);
    }
    xi.push_back(small(rng));  // tie-heavy ranks
    yi.push_back(small(rng) + xi.back());
  }
  EXPECT_NEAR(netqa::correlate(a, b), oracle::pearson_textbook(x, y), 1e-9);
  EXPECT_NEAR(netqa::correlate(a, b, netqa::Correlation::Spearman),
              oracle::pearson_textbook(oracle::ranks_by_counting(x), oracle::ranks_by_counting(y)), 1e-9);

  const CellValues ti(xi.begin(), xi.end()), tj(yi.begin(), yi.end());
  EXPECT_NEAR(netqa::correlate(ti, tj, netqa::Correlation::Spearman),
              oracle::pearson_textbook(oracle::ranks_by_counting(xi), oracle::ranks_by_counting(yi)), 1e-9);
}

TEST(Correlate, Errors) {
  EXPECT_THROW(netqa::correlate({1.0, 2.0, std::nullopt}, {1.0, 3.0, 4.0}), netqa::StatsError);
  EXPECT_THROW(netqa::correlate({1.0, 1.0, 1.0, 1.0}, {1.0, 2.0, 3.0, 4.0}), netqa::StatsError);
  EXPECT_THROW(netqa::correlate({1.0, 2.0}, {1.0, 2.0, 3.0}), netqa::Error);
}
