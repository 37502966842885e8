#pragma once

// Reading feature collections and extracting the classified infrastructure
// subset with an ordered rule list.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"

namespace netqa {

using json = nlohmann::json;

struct RawFeature {
  Polyline geometry;
  Attributes attributes;
  std::string source_id;
};

struct FeatureCollection {
  std::vector<RawFeature> features;
  std::size_t dropped_degenerate = 0;  // zero-length geometries
};

struct ParseOptions {
  bool reject_geographic = true;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw ParseError(origin + ": parse error at line " + std::to_string(line) + ", offset " +
                     std::to_string(e.byte) + ": " + e.what());
  }
}

inline std::vector<Point2D> parse_coords(const json& arr, const std::string& fid) {
  if (!arr.is_array()) throw ParseError("feature " + fid + ": coordinates must be an array");
  std::vector<Point2D> pts;
  pts.reserve(arr.size());
  for (const auto& c : arr) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ParseError("feature " + fid + ": malformed coordinate");
    }
    pts.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return pts;
}

inline const json& coordinates_of(const json& geom, const std::string& fid) {
  if (!geom.is_object() || !geom.contains("coordinates")) {
    throw ParseError("feature " + fid + ": geometry has no coordinates");
  }
  return geom["coordinates"];
}

inline std::string attribute_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  return v.dump();
}

inline std::string feature_id(const json& f, std::size_t index) {
  if (f.contains("id")) {
    const auto& id = f["id"];
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
  }
  if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("id") &&
      !f["properties"]["id"].is_null()) {
    return attribute_string(f["properties"]["id"]);
  }
  return std::to_string(index);
}

inline const json& features_array(const json& doc, const std::string& origin) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ParseError(origin + ": expected a FeatureCollection");
  }
  return doc["features"];
}

inline Polygon parse_polygon_rings(const json& rings, const std::string& fid) {
  if (!rings.is_array() || rings.empty()) throw ParseError("feature " + fid + ": polygon without rings");
  std::vector<Ring> rs;
  for (const auto& r : rings) rs.push_back(parse_coords(r, fid));
  try {
    return normalize_polygon(std::move(rs));
  } catch (const GeometryError& e) {
    throw GeometryError("feature " + fid + ": " + e.what());
  }
}

inline MultiPolygon parse_polygonal(const json& geom, const std::string& fid) {
  const std::string type = geom.is_object() ? geom.value("type", "") : "";
  if (type == "Polygon") return {parse_polygon_rings(coordinates_of(geom, fid), fid)};
  if (type == "MultiPolygon") {
    MultiPolygon mp;
    for (const auto& p : coordinates_of(geom, fid)) mp.push_back(parse_polygon_rings(p, fid));
    return mp;
  }
  throw ParseError("feature " + fid + ": expected Polygon or MultiPolygon geometry, got '" + type + "'");
}

} // namespace detail

/// Parses a GeoJSON-style FeatureCollection of LineString/MultiLineString
/// features. MultiLineString parts become separate features with ids
/// "<id>#<part>".
inline FeatureCollection parse_feature_collection(const std::string& text, const std::string& origin = "<input>",
                                                  ParseOptions opts = {}) {
  const json doc = detail::parse_json_text(text, origin);
  const json& feats = detail::features_array(doc, origin);

  FeatureCollection out;
  std::vector<std::string> bad_type;
  std::set<std::string> seen;
  BBox extent;

  auto add = [&](std::vector<Point2D> pts, Attributes attrs, std::string id) {
    if (!seen.insert(id).second) throw ParseError(origin + ": duplicate feature id '" + id + "'");
    auto line = Polyline::make(std::move(pts));
    if (!line) {
      ++out.dropped_degenerate;
      return;
    }
    extent.extend(line->bbox());
    out.features.push_back(RawFeature{std::move(*line), std::move(attrs), std::move(id)});
  };

  for (std::size_t i = 0; i < feats.size(); ++i) {
    const json& f = feats[i];
    const std::string id = detail::feature_id(f, i);
    Attributes attrs;
    if (f.contains("properties") && f["properties"].is_object()) {
      for (const auto& [k, v] : f["properties"].items()) {
        if (!v.is_null()) attrs.emplace(k, detail::attribute_string(v));
      }
    }
    const json* geom = f.contains("geometry") ? &f["geometry"] : nullptr;
    const std::string type = (geom && geom->is_object()) ? geom->value("type", "") : "";
    if (type == "LineString") {
      add(detail::parse_coords(detail::coordinates_of(*geom, id), id), std::move(attrs), id);
    } else if (type == "MultiLineString") {
      const auto& parts = detail::coordinates_of(*geom, id);
      if (!parts.is_array()) throw ParseError("feature " + id + ": coordinates must be an array");
      for (std::size_t p = 0; p < parts.size(); ++p) {
        add(detail::parse_coords(parts[p], id), attrs, id + "#" + std::to_string(p));
      }
    } else {
      bad_type.push_back(id + " (" + (type.empty() ? "no geometry" : type) + ")");
    }
  }

  if (!bad_type.empty()) {
    std::string msg = origin + ": non-line geometries in features:";
    for (const auto& b : bad_type) msg += " " + b;
    throw ParseError(msg);
  }
  if (opts.reject_geographic && looks_geographic(extent)) {
    throw GeometryError(origin +
                        ": coordinates look geographic (degrees); reproject the data to a projected CRS in meters");
  }
  return out;
}

inline FeatureCollection parse_dataset(const std::string& path, ParseOptions opts = {}) {
  return parse_feature_collection(detail::read_file(path), path, opts);
}

struct NamedPolygon {
  std::string name;
  MultiPolygon geometry;
};

/// Polygon layer where each feature carries a name attribute.
inline std::vector<NamedPolygon> parse_polygon_layer(const std::string& text, const std::string& origin = "<input>",
                                                     const std::string& name_key = "name") {
  const json doc = detail::parse_json_text(text, origin);
  const json& feats = detail::features_array(doc, origin);
  std::vector<NamedPolygon> out;
  BBox extent;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const json& f = feats[i];
    const std::string id = detail::feature_id(f, i);
    NamedPolygon np;
    const json& props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
    np.name = props.contains(name_key) ? detail::attribute_string(props[name_key]) : id;
    np.geometry = detail::parse_polygonal(f.value("geometry", json{}), id);
    extent.extend(bbox(np.geometry));
    out.push_back(std::move(np));
  }
  if (looks_geographic(extent)) {
    throw GeometryError(origin + ": coordinates look geographic (degrees); reproject to a projected CRS in meters");
  }
  return out;
}

/// All polygons of a polygon layer merged into one study area.
inline MultiPolygon parse_study_area(const std::string& text, const std::string& origin = "<input>") {
  MultiPolygon area;
  for (auto& np : parse_polygon_layer(text, origin)) {
    for (auto& p : np.geometry) area.push_back(std::move(p));
  }
  if (area.empty()) throw GeometryError(origin + ": study area has no polygons");
  return area;
}

/// CSV with header `cell_id,population`.
inline std::map<std::string, double> parse_population_csv(const std::string& text,
                                                          const std::string& origin = "<input>") {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(origin + ": line " + std::to_string(lineno) + ": expected 'cell_id,population'");
    }
    const std::string id = line.substr(0, comma);
    const std::string val = line.substr(comma + 1);
    if (lineno == 1 && id == "cell_id") continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc{} || ptr != val.data() + val.size()) {
      throw ParseError(origin + ": line " + std::to_string(lineno) + ": bad population value '" + val + "'");
    }
    out[id] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification rules

/// Boolean expression over attributes. A key ending in '*' matches every
/// attribute key with that prefix; the leaf holds if any matching key does.
class Predicate {
public:
  enum class Kind { Eq, Has, In, All, Any, Not };

  static Predicate eq(std::string key, std::string value) { return leaf(Kind::Eq, std::move(key), {std::move(value)}); }
  static Predicate has(std::string key) { return leaf(Kind::Has, std::move(key), {}); }
  static Predicate in(std::string key, std::vector<std::string> values) {
    return leaf(Kind::In, std::move(key), std::move(values));
  }
  static Predicate all(std::vector<Predicate> c) { return node(Kind::All, std::move(c)); }
  static Predicate any(std::vector<Predicate> c) { return node(Kind::Any, std::move(c)); }
  static Predicate negate(Predicate c) { return node(Kind::Not, {std::move(c)}); }

  [[nodiscard]] bool eval(const Attributes& attrs) const {
    switch (kind_) {
      case Kind::All:
        return std::all_of(children_.begin(), children_.end(), [&](const Predicate& p) { return p.eval(attrs); });
      case Kind::Any:
        return std::any_of(children_.begin(), children_.end(), [&](const Predicate& p) { return p.eval(attrs); });
      case Kind::Not:
        return !children_.front().eval(attrs);
      default:
        break;
    }
    auto test = [&](const std::string& value) {
      switch (kind_) {
        case Kind::Eq:
          return value == values_.front();
        case Kind::Has:
          return !value.empty();
        default:
          return std::find(values_.begin(), values_.end(), value) != values_.end();
      }
    };
    if (!key_.empty() && key_.back() == '*') {
      const std::string_view prefix(key_.data(), key_.size() - 1);
      for (auto it = attrs.lower_bound(std::string(prefix)); it != attrs.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        if (test(it->second)) return true;
      }
      return false;
    }
    const auto it = attrs.find(key_);
    return it != attrs.end() && test(it->second);
  }

  /// Parses {"eq": [k, v]}, {"has": k}, {"in": [k, [v...]]},
  /// {"all": [...]}, {"any": [...]}, {"not": {...}}.
  static Predicate from_json(const json& j) {
    if (!j.is_object() || j.size() != 1) throw ConfigError("predicate must be an object with one operator");
    const auto& [op, arg] = *j.items().begin();
    try {
      if (op == "eq") return eq(arg.at(0).get<std::string>(), arg.at(1).get<std::string>());
      if (op == "has") return has(arg.get<std::string>());
      if (op == "in") return in(arg.at(0).get<std::string>(), arg.at(1).get<std::vector<std::string>>());
      if (op == "all" || op == "any") {
        std::vector<Predicate> c;
        for (const auto& x : arg) c.push_back(from_json(x));
        if (c.empty()) throw ConfigError("'" + op + "' needs at least one operand");
        return op == "all" ? all(std::move(c)) : any(std::move(c));
      }
      if (op == "not") return negate(from_json(arg));
    } catch (const json::exception& e) {
      throw ConfigError("malformed '" + op + "' predicate: " + e.what());
    }
    throw ConfigError("unknown predicate operator '" + op + "'");
  }

  [[nodiscard]] json to_json() const {
    switch (kind_) {
      case Kind::Eq:
        return {{"eq", {key_, values_.front()}}};
      case Kind::Has:
        return {{"has", key_}};
      case Kind::In:
        return {{"in", {key_, values_}}};
      case Kind::Not:
        return {{"not", children_.front().to_json()}};
      default: {
        json arr = json::array();
        for (const auto& c : children_) arr.push_back(c.to_json());
        return {{kind_ == Kind::All ? "all" : "any", arr}};
      }
    }
  }

private:
  static Predicate leaf(Kind k, std::string key, std::vector<std::string> values) {
    Predicate p;
    p.kind_ = k;
    p.key_ = std::move(key);
    p.values_ = std::move(values);
    return p;
  }
  static Predicate node(Kind k, std::vector<Predicate> children) {
    Predicate p;
    p.kind_ = k;
    p.children_ = std::move(children);
    return p;
  }

  Kind kind_ = Kind::All;
  std::string key_;
  std::vector<std::string> values_;
  std::vector<Predicate> children_;
};

struct ClassificationRule {
  Predicate when;
  Classification outcome;

  static ClassificationRule from_json(const json& j) {
    if (!j.is_object() || !j.contains("when")) throw ConfigError("rule needs a 'when' predicate");
    for (const char* k : {"category", "mapping", "direction"}) {
      if (!j.contains(k) || !j[k].is_string()) throw ConfigError(std::string("rule needs a string '") + k + "'");
    }
    return {Predicate::from_json(j["when"]),
            {parse_category(j["category"].get<std::string>()), parse_mapping(j["mapping"].get<std::string>()),
             parse_direction(j["direction"].get<std::string>())}};
  }

  [[nodiscard]] json to_json() const {
    return {{"when", when.to_json()},
            {"category", to_string(outcome.category)},
            {"mapping", to_string(outcome.mapping)},
            {"direction", to_string(outcome.direction)}};
  }
};

inline std::vector<ClassificationRule> rules_from_json(const json& arr) {
  if (!arr.is_array()) throw ConfigError("rules must be an array");
  std::vector<ClassificationRule> rules;
  for (const auto& r : arr) rules.push_back(ClassificationRule::from_json(r));
  return rules;
}

struct Dataset {
  std::string name;
  std::vector<NetworkEdge> edges;
  std::string crs_label;
  std::size_t dropped_unclassified = 0;
  std::vector<std::string> warnings;
};

/// First matching rule wins; features matching no rule are dropped.
inline Dataset classify(const std::vector<RawFeature>& features, const std::vector<ClassificationRule>& rules,
                        std::string name = {}, std::string crs_label = {}) {
  if (rules.empty()) throw ConfigError("classification needs at least one rule");
  Dataset d;
  d.name = std::move(name);
  d.crs_label = std::move(crs_label);
  for (const auto& f : features) {
    const auto hit = std::find_if(rules.begin(), rules.end(),
                                  [&](const ClassificationRule& r) { return r.when.eval(f.attributes); });
    if (hit == rules.end()) {
      ++d.dropped_unclassified;
      continue;
    }
    NetworkEdge e;
    e.id = f.source_id;
    e.geometry = f.geometry;
    e.cls = hit->outcome;
    e.attributes = f.attributes;
    d.edges.push_back(std::move(e));
  }
  if (d.edges.empty()) {
    d.warnings.push_back("dataset '" + d.name + "': no feature matched any classification rule");
  }
  return d;
}

/// The raw features behind a classified dataset.
inline std::vector<RawFeature> raw_features(const Dataset& d) {
  std::vector<RawFeature> out;
  out.reserve(d.edges.size());
  for (const auto& e : d.edges) out.push_back(RawFeature{e.geometry, e.attributes, e.id});
  return out;
}

/// Rules approximating the usual OpenStreetMap extraction of dedicated
/// bicycle infrastructure. Documentation defaults; override in config.
inline std::vector<ClassificationRule> default_candidate_rules() {
  using P = Predicate;
  return {
      {P::any({P::eq("highway", "cycleway"), P::in("cycleway*", {"track", "opposite_track"})}),
       {InfraCategory::Protected, MappingModel::SeparateGeometry, Directionality::Oneway}},
      {P::in("cycleway:both", {"lane"}),
       {InfraCategory::Unprotected, MappingModel::Centerline, Directionality::Bidirectional}},
      {P::eq("cycleway", "lane"), {InfraCategory::Unprotected, MappingModel::Centerline, Directionality::Bidirectional}},
      {P::in("cycleway*", {"lane", "opposite_lane"}),
       {InfraCategory::Unprotected, MappingModel::Centerline, Directionality::Oneway}},
  };
}

/// Rules for a reference dataset keyed on a `category` attribute.
inline std::vector<ClassificationRule> default_reference_rules() {
  using P = Predicate;
  return {
      {P::in("category", {"cycle_track", "cycle_path"}),
       {InfraCategory::Protected, MappingModel::SeparateGeometry, Directionality::Oneway}},
      {P::eq("category", "cycle_lane"),
       {InfraCategory::Unprotected, MappingModel::SeparateGeometry, Directionality::Oneway}},
  };
}

} // namespace netqa
