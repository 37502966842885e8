#pragma once

// Thin wrappers over boost::geometry R-trees. Query results are returned in
// ascending id order so callers never depend on tree traversal order.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "netqa/geometry.hpp"

namespace netqa {

class BoxIndex {
public:
  BoxIndex() = default;

  explicit BoxIndex(const std::vector<BBox>& boxes) {
    std::vector<Value> values;
    values.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) values.emplace_back(to_box(boxes[i]), i);
    tree_ = Tree(values.begin(), values.end());
  }

  /// Ids of all boxes intersecting `query`, ascending.
  [[nodiscard]] std::vector<std::size_t> query(const BBox& query) const {
    std::vector<Value> hits;
    tree_.query(boost::geometry::index::intersects(to_box(query)), std::back_inserter(hits));
    std::vector<std::size_t> ids;
    ids.reserve(hits.size());
    for (const auto& h : hits) ids.push_back(h.second);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  [[nodiscard]] std::size_t size() const { return tree_.size(); }

private:
  using BPoint = boost::geometry::model::point<double, 2, boost::geometry::cs::cartesian>;
  using BBox2 = boost::geometry::model::box<BPoint>;
  using Value = std::pair<BBox2, std::size_t>;
  using Tree = boost::geometry::index::rtree<Value, boost::geometry::index::rstar<16>>;

  static BBox2 to_box(const BBox& b) { return BBox2(BPoint(b.min_x, b.min_y), BPoint(b.max_x, b.max_y)); }

  Tree tree_;
};

} // namespace netqa
