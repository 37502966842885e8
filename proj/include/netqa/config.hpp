#pragma once

// Run configuration: one JSON document naming every input and parameter.
// Relative paths resolve against the directory of the config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netqa/error.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/ingest.hpp"
#include "netqa/length_policy.hpp"
#include "netqa/matching.hpp"
#include "netqa/network.hpp"
#include "netqa/spatial_stats.hpp"
#include "netqa/tags.hpp"

namespace netqa {

struct DatasetConfig {
  std::string role;  // "candidate" or "reference"
  std::string name;
  std::string path;
  std::string crs;
  std::vector<ClassificationRule> rules;
};

struct RunConfig {
  DatasetConfig candidate;
  DatasetConfig reference;
  std::string study_area;
  std::optional<std::string> polygons;
  std::string polygon_name_key = "name";
  std::optional<std::string> population;

  LengthPolicy length_policy;
  MatchConfig matching;
  double cell_area = kDefaultCellArea;
  double undershoot_threshold = kDefaultUndershootThreshold;
  double snap_tolerance = kDefaultSnapTolerance;
  std::vector<WeightsScheme> weights{WeightsScheme::knn(6)};
  unsigned n_perm = 999;
  std::uint64_t seed = 0;
  double alpha = kDefaultAlpha;
  std::vector<TagSpec> tags = default_tag_specs();
  TagWeighting tag_weighting = TagWeighting::Infrastructure;
  std::vector<std::string> autocorr_metrics;  // empty: all default metrics
  std::string output_dir = "netqa_out";
  std::string base_dir = ".";  // directory of the config file

  /// Path as shown in reports: relative to the config directory.
  [[nodiscard]] std::string display_path(const std::string& p) const {
    const auto rel = std::filesystem::path(p).lexically_relative(base_dir);
    return rel.empty() ? p : rel.generic_string();
  }

  /// Every file the run reads.
  [[nodiscard]] std::vector<std::string> input_paths() const {
    std::vector<std::string> p{candidate.path, reference.path, study_area};
    if (polygons) p.push_back(*polygons);
    if (population) p.push_back(*population);
    return p;
  }

  void check_files() const {
    for (const auto& p : input_paths()) {
      if (!std::filesystem::is_regular_file(p)) throw ConfigError("input file not found: " + p);
    }
  }

  /// Resolved configuration, defaults included, for report headers. The
  /// output directory is left out so reports do not depend on --out.
  [[nodiscard]] nlohmann::json to_json() const {
    using nlohmann::json;
    auto ds = [this](const DatasetConfig& d) {
      json rules = json::array();
      for (const auto& r : d.rules) rules.push_back(r.to_json());
      return json{{"name", d.name}, {"path", display_path(d.path)}, {"crs", d.crs}, {"rules", rules}};
    };
    json weights_j = json::array();
    for (const auto& w : weights) weights_j.push_back(w.label());
    json tags_j = json::array();
    for (const auto& t : tags) tags_j.push_back({{"name", t.name}, {"keys", t.keys}});
    return {
        {"candidate", ds(candidate)},
        {"reference", ds(reference)},
        {"study_area", display_path(study_area)},
        {"polygons", polygons ? json(display_path(*polygons)) : json(nullptr)},
        {"polygon_name_key", polygon_name_key},
        {"population", population ? json(display_path(*population)) : json(nullptr)},
        {"length_policy", length_policy.to_json()},
        {"matching", matching.to_json()},
        {"grid", {{"cell_area", cell_area}, {"orientation", "flat-top"}}},
        {"undershoot_threshold", undershoot_threshold},
        {"snap_tolerance", snap_tolerance},
        {"weights", weights_j},
        {"n_perm", n_perm},
        {"seed", seed},
        {"alpha", alpha},
        {"tags", tags_j},
        {"tag_weighting", tag_weighting == TagWeighting::Infrastructure ? "infrastructure" : "geometric"},
        {"autocorr_metrics", autocorr_metrics},
    };
  }
};

namespace detail {

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline DatasetConfig dataset_config(const nlohmann::json& j, const std::string& role,
                                    const std::filesystem::path& base) {
  if (!j.contains(role) || !j[role].is_object()) throw ConfigError("config needs a '" + role + "' object");
  const auto& d = j[role];
  DatasetConfig c;
  c.role = role;
  c.name = get_or<std::string>(d, "name", role);
  if (!d.contains("path") || !d["path"].is_string()) throw ConfigError(role + ".path is required");
  c.path = resolve_path(base, d["path"].get<std::string>());
  c.crs = get_or<std::string>(d, "crs", "");
  if (d.contains("rules")) {
    const auto& r = d["rules"];
    if (r.is_string()) {
      const auto text = read_file(resolve_path(base, r.get<std::string>()));
      c.rules = rules_from_json(parse_json_text(text, r.get<std::string>()));
    } else {
      c.rules = rules_from_json(r);
    }
  } else {
    c.rules = role == "candidate" ? default_candidate_rules() : default_reference_rules();
  }
  if (c.rules.empty()) throw ConfigError(role + ".rules must not be empty");
  return c;
}

} // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.base_dir = base.lexically_normal().string();
  c.candidate = detail::dataset_config(j, "candidate", base);
  c.reference = detail::dataset_config(j, "reference", base);
  if (!j.contains("study_area") || !j["study_area"].is_string()) throw ConfigError("study_area path is required");
  c.study_area = detail::resolve_path(base, j["study_area"].get<std::string>());
  if (j.contains("polygons") && j["polygons"].is_string()) {
    c.polygons = detail::resolve_path(base, j["polygons"].get<std::string>());
  }
  c.polygon_name_key = detail::get_or<std::string>(j, "polygon_name_key", c.polygon_name_key);
  if (j.contains("population") && j["population"].is_string()) {
    c.population = detail::resolve_path(base, j["population"].get<std::string>());
  }
  c.length_policy = LengthPolicy::from_json(j.value("length_policy", nlohmann::json{}));
  c.matching = MatchConfig::from_json(j.value("matching", nlohmann::json{}));
  if (j.contains("grid")) c.cell_area = detail::get_or<double>(j["grid"], "cell_area", c.cell_area);
  if (!(c.cell_area > 0.0)) throw ConfigError("grid.cell_area must be > 0");
  c.undershoot_threshold = detail::get_or<double>(j, "undershoot_threshold", c.undershoot_threshold);
  if (!(c.undershoot_threshold > 0.0)) throw ConfigError("undershoot_threshold must be > 0");
  c.snap_tolerance = detail::get_or<double>(j, "snap_tolerance", c.snap_tolerance);
  if (!(c.snap_tolerance >= 0.0)) throw ConfigError("snap_tolerance must be >= 0");
  if (j.contains("weights")) {
    c.weights.clear();
    for (const auto& w : j["weights"]) {
      if (!w.is_string()) throw ConfigError("weights entries are strings like \"knn6\" or \"band1000\"");
      c.weights.push_back(WeightsScheme::parse(w.get<std::string>()));
    }
    if (c.weights.empty()) throw ConfigError("weights must list at least one scheme");
  }
  c.n_perm = detail::get_or<unsigned>(j, "n_perm", c.n_perm);
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    throw ConfigError("seed is required (non-negative integer) for reproducible permutation tests");
  }
  c.seed = j["seed"].get<std::uint64_t>();
  c.alpha = detail::get_or<double>(j, "alpha", c.alpha);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  if (j.contains("tags")) {
    c.tags.clear();
    for (const auto& t : j["tags"]) {
      c.tags.push_back(TagSpec::make(t.at("name").get<std::string>(), t.at("keys").get<std::vector<std::string>>()));
    }
  }
  const auto weighting = detail::get_or<std::string>(j, "tag_weighting", "infrastructure");
  if (weighting == "infrastructure") {
    c.tag_weighting = TagWeighting::Infrastructure;
  } else if (weighting == "geometric") {
    c.tag_weighting = TagWeighting::Geometric;
  } else {
    throw ConfigError("tag_weighting must be 'infrastructure' or 'geometric'");
  }
  c.autocorr_metrics = detail::get_or<std::vector<std::string>>(j, "autocorr_metrics", {});
  c.output_dir = detail::resolve_path(base, detail::get_or<std::string>(j, "output_dir", c.output_dir));
  return c;
}

inline RunConfig load_config(const std::string& path) {
  const auto text = detail::read_file(path);
  const auto doc = detail::parse_json_text(text, path);
  const auto base = std::filesystem::path(path).parent_path();
  return config_from_json(doc, base.empty() ? std::filesystem::path(".") : base);
}

} // namespace netqa
