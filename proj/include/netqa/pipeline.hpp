#pragma once

// End-to-end run: ingest -> graph -> grid -> completeness -> matching ->
// tags -> spatial statistics. Everything is computed in memory; files are
// only written once every requested stage has succeeded.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netqa/completeness.hpp"
#include "netqa/config.hpp"
#include "netqa/error.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/ingest.hpp"
#include "netqa/matching.hpp"
#include "netqa/network.hpp"
#include "netqa/report.hpp"
#include "netqa/spatial_stats.hpp"
#include "netqa/tags.hpp"

namespace netqa {

enum class Stage { Validate, Density, Structure, Match, Tags, Autocorr, Full };

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "validate") return Stage::Validate;
  if (s == "density") return Stage::Density;
  if (s == "structure") return Stage::Structure;
  if (s == "match") return Stage::Match;
  if (s == "tags") return Stage::Tags;
  if (s == "autocorr") return Stage::Autocorr;
  if (s == "full") return Stage::Full;
  return std::nullopt;
}

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Validate:
      return "validate";
    case Stage::Density:
      return "density";
    case Stage::Structure:
      return "structure";
    case Stage::Match:
      return "match";
    case Stage::Tags:
      return "tags";
    case Stage::Autocorr:
      return "autocorr";
    default:
      return "full";
  }
}

/// A failure inside one pipeline stage; what() starts with the stage name.
class PipelineError : public Error {
public:
  PipelineError(std::string stage, const std::string& msg)
      : Error("stage '" + stage + "' failed: " + msg), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

struct PipelineResult {
  nlohmann::json summary;
  std::string text;
  std::vector<report::OutputFile> files;
  std::vector<std::string> warnings;
};

class Pipeline {
public:
  Pipeline(RunConfig cfg, unsigned threads = 1) : cfg_(std::move(cfg)), threads_(std::max(1u, threads)) {}

  PipelineResult run(Stage stage) {
    result_ = PipelineResult{};
    auto& s = result_.summary;
    s["config"] = cfg_.to_json();
    s["stage"] = std::string(to_string(stage));

    load_inputs();
    if (stage == Stage::Validate) {
      result_.text = validation_text();
      finish();
      return std::move(result_);
    }
    build_cells();

    const bool full = stage == Stage::Full;
    const bool autocorr = stage == Stage::Autocorr || full;
    if (stage == Stage::Density || full) density_section(true);
    if (stage == Stage::Structure || full) structure_section(true);
    if (stage == Stage::Match || full) match_section(true);
    if (stage == Stage::Tags || full) tags_section(true);
    if (autocorr) {
      if (!full) {
        density_section(false);
        structure_section(false);
        match_section(false);
        tags_section(false);
      }
      autocorr_section();
    }
    if (stage != Stage::Structure) add_grid_layer();
    add_text_summary(stage);
    finish();
    return std::move(result_);
  }

private:
  struct Role {
    const DatasetConfig* cfg = nullptr;
    FeatureCollection raw;
    Dataset dataset;
    std::optional<Graph> graph;
    std::optional<CellLengths> lengths;
    LengthTotals totals;
  };

  template <class F>
  decltype(auto) in_stage(const std::string& name, F&& f) {
    try {
      return f();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  }

  void warn(std::string w) { result_.warnings.push_back(std::move(w)); }

  void finish() {
    result_.summary["warnings"] = result_.warnings;
    result_.files.insert(result_.files.begin(), report::OutputFile{"summary.json", report::dump_pretty(result_.summary)});
    if (!result_.text.empty()) result_.files.insert(result_.files.begin() + 1, {"summary.txt", result_.text});
    if (result_.summary["stage"] == "validate") result_.files.clear();
  }

  // ---------------------------------------------------------------- ingest

  void load_inputs() {
    in_stage("ingest", [&] {
      cfg_.check_files();
      for (auto* role : {&cand_, &ref_}) {
        role->cfg = role == &cand_ ? &cfg_.candidate : &cfg_.reference;
        role->raw = parse_dataset(role->cfg->path);
        role->dataset = classify(role->raw.features, role->cfg->rules, role->cfg->name, role->cfg->crs);
        for (const auto& w : role->dataset.warnings) warn(w);
        if (role->raw.dropped_degenerate) {
          warn(role->cfg->role + ": dropped " + std::to_string(role->raw.dropped_degenerate) +
               " zero-length geometries");
        }
        role->totals = length_totals(role->dataset.edges, cfg_.length_policy);
      }
      study_area_ = parse_study_area(detail::read_file(cfg_.study_area), cfg_.study_area);
      if (cfg_.polygons) {
        polygons_ = parse_polygon_layer(detail::read_file(*cfg_.polygons), *cfg_.polygons, cfg_.polygon_name_key);
      }
      if (cfg_.population) population_ = parse_population_csv(detail::read_file(*cfg_.population), *cfg_.population);
    });
    auto ds = [](const Role& r) {
      return nlohmann::json{{"name", r.dataset.name},
                            {"features_read", r.raw.features.size()},
                            {"dropped_degenerate", r.raw.dropped_degenerate},
                            {"dropped_unclassified", r.dataset.dropped_unclassified},
                            {"edges", r.dataset.edges.size()}};
    };
    result_.summary["inputs"] = {{"candidate", ds(cand_)},
                                 {"reference", ds(ref_)},
                                 {"study_area_km2", area(study_area_) / 1e6},
                                 {"polygons", polygons_.size()},
                                 {"population_cells", population_.size()}};
  }

  [[nodiscard]] std::string validation_text() const {
    std::string t = "configuration OK\n";
    for (const auto* r : {&cand_, &ref_}) {
      t += r->cfg->role + " '" + r->dataset.name + "': " + std::to_string(r->raw.features.size()) + " features, " +
           std::to_string(r->dataset.edges.size()) + " classified edges\n";
    }
    for (const auto& w : result_.warnings) t += "warning: " + w + "\n";
    return t;
  }

  // ---------------------------------------------------------------- grid

  void build_cells() {
    grid_ = in_stage("grid", [&] { return build_grid(study_area_, cfg_.cell_area); });
    result_.summary["grid"] = {{"cells", grid_->size()},
                               {"cell_area_m2", grid_->cell_area()},
                               {"edge_length_m", grid_->edge_length()},
                               {"origin", report::coords(grid_->origin())},
                               {"orientation", "flat-top"},
                               {"cell_id", "axial q_r"}};
    for (auto* role : {&cand_, &ref_}) {
      role->lengths = in_stage("density", [&] {
        return assign_lengths(role->dataset.edges, *grid_, cfg_.length_policy, threads_);
      });
      for (const auto& w : role->lengths->warnings) warn(role->cfg->role + ": " + w);
    }
  }

  void set_metric(const std::string& name, CellValues v) { metrics_[name] = std::move(v); }

  // ---------------------------------------------------------------- density

  void density_section(bool emit) {
    in_stage("density", [&] {
      const auto da = density_surface(*cand_.lengths, *grid_, cand_.dataset.name);
      const auto db = density_surface(*ref_.lengths, *grid_, ref_.dataset.name);
      set_metric("candidate_density", da.density);
      set_metric("reference_density", db.density);
      const auto diff = density_difference(da, db);
      set_metric("density_difference", diff);
      if (!population_.empty()) population_metric();
      if (!emit) return;

      auto lengths_json = [&](const Role& r, const DensitySurface& d) {
        return nlohmann::json{
            {"total_infrastructure_km", r.totals.infrastructure / 1000.0},
            {"protected_km", r.totals.protected_length / 1000.0},
            {"unprotected_km", r.totals.unprotected_length / 1000.0},
            {"geometric_km", r.totals.geometric / 1000.0},
            {"assigned_km", r.lengths->assigned() / 1000.0},
            {"outside_grid_km", r.lengths->outside / 1000.0},
            {"global_density_km_per_km2", r.totals.infrastructure / area(study_area_) * 1000.0},
            {"cell_density", report::cell_stats(d.density).to_json()},
        };
      };
      std::size_t either = 0;
      for (const auto& v : diff) either += v.has_value();
      auto& sec = result_.summary["density"];
      sec["candidate"] = lengths_json(cand_, da);
      sec["reference"] = lengths_json(ref_, db);
      sec["cells_with_data"] = either;
      sec["density_difference"] = report::cell_stats(diff).to_json();
      sec["difference_convention"] = "reference minus candidate, km/km2";

      std::string csv = "metric,candidate,reference\n";
      auto row = [&](const char* name, double a, double b) {
        csv += std::string(name) + "," + report::exact(a) + "," + report::exact(b) + "\n";
      };
      row("total_infrastructure_km", cand_.totals.infrastructure / 1000.0, ref_.totals.infrastructure / 1000.0);
      row("protected_km", cand_.totals.protected_length / 1000.0, ref_.totals.protected_length / 1000.0);
      row("unprotected_km", cand_.totals.unprotected_length / 1000.0, ref_.totals.unprotected_length / 1000.0);
      row("geometric_km", cand_.totals.geometric / 1000.0, ref_.totals.geometric / 1000.0);
      result_.files.push_back({"global_summary.csv", csv});

      if (!polygons_.empty()) {
        const auto agg = polygon_aggregate(cand_.dataset.edges, ref_.dataset.edges, polygons_, cfg_.length_policy);
        for (const auto& w : agg.warnings) warn(w);
        std::string pcsv =
            "name,area_km2,candidate_km,reference_km,candidate_density,reference_density,relative_difference\n";
        std::size_t more_candidate = 0;
        for (const auto& r : agg.rows) {
          pcsv += report::csv_field(r.name) + "," + report::exact(r.area / 1e6) + "," +
                  report::exact(r.length_a / 1000.0) + "," + report::exact(r.length_b / 1000.0) + "," +
                  report::exact(r.density_a) + "," + report::exact(r.density_b) + "," +
                  (r.relative_difference ? report::exact(*r.relative_difference) : std::string()) + "\n";
          if (r.length_a > r.length_b) ++more_candidate;
        }
        result_.files.push_back({"polygons.csv", pcsv});
        sec["polygons"] = {{"count", agg.rows.size()}, {"more_candidate_length", more_candidate}};
      }
    });
  }

  void population_metric() {
    CellValues pop(grid_->size());
    const double km2 = grid_->cell_area() / 1e6;
    std::size_t unknown = 0;
    for (const auto& [id, value] : population_) {
      const auto cid = CellId::parse(id);
      const auto idx = cid ? grid_->find(*cid) : std::nullopt;
      if (!idx) {
        ++unknown;
        continue;
      }
      pop[*idx] = value / km2;
    }
    if (unknown) warn("population table: " + std::to_string(unknown) + " cell ids not in the grid");
    set_metric("population_density", std::move(pop));
  }

  // ---------------------------------------------------------------- structure

  void structure_section(bool emit) {
    in_stage("structure", [&] {
      for (auto* role : {&cand_, &ref_}) {
        if (!role->graph) role->graph = build_graph(role->dataset, cfg_.snap_tolerance);
        set_metric(role->cfg->role + "_components", [&] {
          CellValues v(grid_->size());
          const auto counts = local_component_count(*role->graph, *grid_, threads_);
          for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c]) v[c] = static_cast<double>(*counts[c]);
          }
          return v;
        }());
        if (!emit) continue;

        const Graph& g = *role->graph;
        const auto lengths = component_lengths(g, cfg_.length_policy);
        const auto zipf = component_zipf(lengths);
        const auto dangling = dangling_nodes(g);
        const auto under = detect_undershoots(g, cfg_.undershoot_threshold, threads_);
        const double total = role->totals.infrastructure;
        const double largest = zipf.empty() ? 0.0 : zipf.front().length;

        result_.summary["structure"][role->cfg->role] = {
            {"nodes", g.nodes.size()},
            {"dangling_nodes", dangling.size()},
            {"undershoots", under.size()},
            {"components", g.components.size()},
            {"total_infrastructure_km", total / 1000.0},
            {"largest_component_km", largest / 1000.0},
            {"largest_component_share_pct", total > 0.0 ? 100.0 * largest / total : 0.0},
            {"local_component_count", report::cell_stats(metrics_[role->cfg->role + "_components"]).to_json()},
        };

        std::string csv = "rank,component_id,length_km\n";
        for (const auto& z : zipf) {
          csv += std::to_string(z.rank) + "," + std::to_string(z.component) + "," + report::exact(z.length / 1000.0) +
                 "\n";
        }
        result_.files.push_back({"zipf_" + role->cfg->role + ".csv", csv});

        nlohmann::json feats = nlohmann::json::array();
        for (const auto& u : under) {
          feats.push_back(report::feature(report::point_geometry(g.nodes[u.node].location),
                                          {{"node_id", u.node},
                                           {"nearest_edge", g.edges[u.nearest_edge].id},
                                           {"gap_m", u.gap}}));
        }
        result_.files.push_back({"undershoots_" + role->cfg->role + ".geojson",
                                 report::dump_layer(report::collection("undershoots_" + role->cfg->role, feats))});

        std::vector<std::size_t> rank_of(zipf.size());
        for (const auto& z : zipf) rank_of[z.component] = z.rank;
        feats = nlohmann::json::array();
        for (const auto& e : g.edges) {
          feats.push_back(report::feature(report::line_geometry(e.geometry.vertices()),
                                          {{"edge_id", e.id},
                                           {"component_id", e.component},
                                           {"component_rank", rank_of[e.component]},
                                           {"from_node", e.from_node},
                                           {"to_node", e.to_node},
                                           {"infrastructure_m", infrastructure_length(e, cfg_.length_policy)}}));
        }
        result_.files.push_back({"components_" + role->cfg->role + ".geojson",
                                 report::dump_layer(report::collection("components_" + role->cfg->role, feats))});
      }
    });
  }

  // ---------------------------------------------------------------- matching

  void match_section(bool emit) {
    in_stage("match", [&] {
      if (!matches_) matches_ = match_datasets(cand_.dataset.edges, ref_.dataset.edges, cfg_.matching, threads_);
      const auto sa = match_summary(matches_->records_a, matches_->segments_a, *grid_);
      const auto sb = match_summary(matches_->records_b, matches_->segments_b, *grid_);
      set_metric("candidate_pct_matched", sa.cell_pct);
      set_metric("reference_pct_matched", sb.cell_pct);
      if (!emit) return;

      auto table = [](const MatchSummary& s) {
        const auto local = report::cell_stats(s.cell_pct);
        return nlohmann::json{{"segments", s.segment_count},
                              {"matched_segments", s.matched_count},
                              {"pct_matched_segments", s.pct_count()},
                              {"segment_length_km", s.total_length / 1000.0},
                              {"matched_length_km", s.matched_length / 1000.0},
                              {"pct_matched_length", s.pct_length()},
                              {"local_pct_matched", local.to_json()}};
      };
      result_.summary["matching"] = {{"candidate", table(sa)}, {"reference", table(sb)}};

      auto layer = [&](const std::string& role, const std::vector<Segment>& segs,
                       const std::vector<MatchRecord>& recs, const std::vector<NetworkEdge>& edges) {
        nlohmann::json feats = nlohmann::json::array();
        for (std::size_t i = 0; i < segs.size(); ++i) {
          const auto& r = recs[i];
          const std::array<Point2D, 2> pts{segs[i].start, segs[i].end};
          nlohmann::json props{{"segment_id", i},
                               {"edge_id", edges[segs[i].parent_edge].id},
                               {"offset_m", segs[i].offset},
                               {"length_m", segs[i].length},
                               {"matched", r.matched.has_value()}};
          if (r.matched) {
            props["matched_segment"] = *r.matched;
            props["midpoint_dist_m"] = r.score.midpoint_dist;
            props["hausdorff_m"] = r.score.hausdorff;
            props["angle_deg"] = r.score.angle;
            props["score"] = r.score.composite;
          } else {
            props["matched_segment"] = nullptr;
          }
          feats.push_back(report::feature(report::line_geometry(pts), std::move(props)));
        }
        result_.files.push_back(
            {"matches_" + role + ".geojson", report::dump_layer(report::collection("matches_" + role, feats))});
      };
      layer("candidate", matches_->segments_a, matches_->records_a, cand_.dataset.edges);
      layer("reference", matches_->segments_b, matches_->records_b, ref_.dataset.edges);
    });
  }

  // ---------------------------------------------------------------- tags

  void tags_section(bool emit) {
    in_stage("tags", [&] {
      for (const auto& spec : cfg_.tags) {
        const auto share = tag_share(cand_.dataset.edges, spec, *grid_, cfg_.length_policy, cfg_.tag_weighting,
                                     threads_);
        set_metric("tag_" + spec.name + "_pct", share.cell_pct);
        if (!emit) continue;
        result_.summary["tags"][spec.name] = {{"keys", spec.keys},
                                              {"global_pct", share.global_pct},
                                              {"tagged_km", share.tagged_length / 1000.0},
                                              {"total_km", share.total_length / 1000.0},
                                              {"local_pct", report::cell_stats(share.cell_pct).to_json()}};
      }
    });
  }

  // ---------------------------------------------------------------- autocorrelation

  [[nodiscard]] std::vector<std::string> autocorr_metric_names() const {
    if (!cfg_.autocorr_metrics.empty()) return cfg_.autocorr_metrics;
    std::vector<std::string> names{"density_difference", "candidate_pct_matched", "reference_pct_matched"};
    for (const auto& t : cfg_.tags) names.push_back("tag_" + t.name + "_pct");
    return names;
  }

  void autocorr_section() {
    in_stage("autocorr", [&] {
      auto& sec = result_.summary["autocorrelation"];
      sec["alpha"] = cfg_.alpha;
      sec["n_perm"] = cfg_.n_perm;
      sec["seed"] = cfg_.seed;
      sec["null_cells"] = "excluded before weights construction";
      for (const auto& name : autocorr_metric_names()) {
        const auto it = metrics_.find(name);
        if (it == metrics_.end()) throw ConfigError("unknown autocorrelation metric '" + name + "'");
        const CellValues& values = it->second;

        std::vector<std::size_t> cells;
        std::vector<double> x;
        std::vector<Point2D> loc;
        std::vector<std::uint64_t> keys;
        for (std::size_t c = 0; c < values.size(); ++c) {
          if (!values[c]) continue;
          cells.push_back(c);
          x.push_back(*values[c]);
          loc.push_back(grid_->cells()[c].centroid);
          keys.push_back(grid_->cells()[c].id.key());
        }

        auto& m = sec["metrics"][name];
        m["cells"] = cells.size();
        for (std::size_t wi = 0; wi < cfg_.weights.size(); ++wi) {
          const auto& scheme = cfg_.weights[wi];
          try {
            const auto w = build_weights(loc, keys, scheme, threads_);
            const auto g = global_moran(x, w, cfg_.n_perm, cfg_.seed, threads_);
            m["global"][scheme.label()] = {{"I", g.I},
                                           {"expected_I", g.expected_I},
                                           {"pseudo_p", g.pseudo_p},
                                           {"n", g.n},
                                           {"isolated_cells", w.isolated.size()},
                                           {"sim_mean", g.sim_mean},
                                           {"sim_sd", g.sim_sd}};
            if (wi == 0) lisa_layer(name, cells, x, w, keys, m);
          } catch (const StatsError& e) {
            m["global"][scheme.label()] = {{"skipped", e.what()}};
            warn("autocorrelation of '" + name + "' with " + scheme.label() + " skipped: " + e.what());
          }
        }
      }
      if (metrics_.count("population_density")) correlations();
    });
  }

  void lisa_layer(const std::string& name, const std::vector<std::size_t>& cells, const std::vector<double>& x,
                  const SpatialWeights& w, const std::vector<std::uint64_t>& keys, nlohmann::json& m) {
    const auto lisa = local_moran(x, w, keys, cfg_.n_perm, cfg_.seed, cfg_.alpha, threads_);
    std::vector<nlohmann::json> quad(grid_->size()), sig(grid_->size());
    std::map<std::string, std::size_t> counts{{"HH", 0}, {"LL", 0}, {"HL", 0}, {"LH", 0}, {"ns", 0}};
    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto& cell = grid_->cells()[cells[k]];
      const std::string q(to_string(lisa.quadrant[k]));
      quad[cells[k]] = q;
      sig[cells[k]] = static_cast<bool>(lisa.significant[k]);
      ++counts[lisa.significant[k] ? q : "ns"];
      feats.push_back(report::feature(report::hex_geometry(cell), {{"cell_id", cell.id.str()},
                                                                   {"value", x[k]},
                                                                   {"z", lisa.z[k]},
                                                                   {"lag", lisa.lag[k]},
                                                                   {"local_I", lisa.local_I[k]},
                                                                   {"pseudo_p", lisa.pseudo_p[k]},
                                                                   {"quadrant", q},
                                                                   {"significant", bool(lisa.significant[k])}}));
    }
    labels_[name + "_lisa_quadrant"] = std::move(quad);
    labels_[name + "_lisa_significant"] = std::move(sig);
    m["lisa"] = {{"weights", w.scheme.label()}, {"significant_clusters", counts}};
    result_.files.push_back({"lisa_" + name + ".geojson",
                             report::dump_layer(report::collection("lisa_" + name, feats))});
  }

  void correlations() {
    auto& sec = result_.summary["correlations"];
    const auto& pop = metrics_.at("population_density");
    for (const auto& [name, values] : metrics_) {
      if (name == "population_density") continue;
      for (const auto& [label, method] : {std::pair{"pearson", Correlation::Pearson},
                                         std::pair{"spearman", Correlation::Spearman}}) {
        try {
          sec[name][label] = correlate(pop, values, method);
        } catch (const StatsError& e) {
          sec[name][label] = nullptr;
        }
      }
    }
  }

  // ---------------------------------------------------------------- layers and text

  void add_grid_layer() {
    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t c = 0; c < grid_->size(); ++c) {
      const auto& cell = grid_->cells()[c];
      nlohmann::json props{{"cell_id", cell.id.str()}, {"q", cell.id.q}, {"r", cell.id.r}};
      for (const auto& [name, values] : metrics_) props[name] = report::optional_number(values[c]);
      for (const auto& [name, values] : labels_) props[name] = values[c];
      feats.push_back(report::feature(report::hex_geometry(cell), std::move(props)));
    }
    result_.files.push_back({"grid_metrics.geojson", report::dump_layer(report::collection("grid_metrics", feats))});
  }

  void add_text_summary(Stage stage) {
    const auto& s = result_.summary;
    std::string t = "netqa " + std::string(to_string(stage)) + " report\n";
    t += "candidate: " + cand_.dataset.name + "   reference: " + ref_.dataset.name + "\n";
    t += "grid: " + std::to_string(grid_->size()) + " flat-top hex cells of " + report::num(grid_->cell_area() / 1e6) +
         " km2\n";
    t += "matching: seg_len " + report::num(cfg_.matching.seg_len, 1) + " m, max_dist " +
         report::num(cfg_.matching.max_dist, 1) + " m, max_hausdorff " + report::num(cfg_.matching.max_hausdorff, 1) +
         " m, max_angle " + report::num(cfg_.matching.max_angle, 1) + " deg\n";
    t += "undershoot threshold " + report::num(cfg_.undershoot_threshold, 2) + " m, snap tolerance " +
         report::num(cfg_.snap_tolerance, 4) + " m, seed " + std::to_string(cfg_.seed) + ", permutations " +
         std::to_string(cfg_.n_perm) + "\n\n";

    auto get = [](const nlohmann::json& j, const char* k) { return j.contains(k) ? j[k].get<double>() : 0.0; };
    if (s.contains("density") || s.contains("structure")) {
      report::TextTable tab({"Extrinsic summary", cand_.dataset.name, ref_.dataset.name});
      if (s.contains("density")) {
        const auto &a = s["density"]["candidate"], &b = s["density"]["reference"];
        for (const auto& [label, key] : {std::pair{"Total infrastructure length (km)", "total_infrastructure_km"},
                                         {"Protected infrastructure length (km)", "protected_km"},
                                         {"Unprotected infrastructure length (km)", "unprotected_km"}}) {
          tab.add({label, report::num(get(a, key)), report::num(get(b, key))});
        }
      }
      if (s.contains("structure")) {
        const auto &a = s["structure"]["candidate"], &b = s["structure"]["reference"];
        for (const auto& [label, key] : {std::pair{"Nodes", "nodes"},
                                         {"Dangling nodes", "dangling_nodes"},
                                         {"Undershoots", "undershoots"},
                                         {"Components", "components"}}) {
          tab.add({label, std::to_string(a[key].get<std::size_t>()), std::to_string(b[key].get<std::size_t>())});
        }
        tab.add({"Length of largest component (km)", report::num(get(a, "largest_component_km")),
                 report::num(get(b, "largest_component_km"))});
        tab.add({"Largest component share (%)", report::num(get(a, "largest_component_share_pct"), 2),
                 report::num(get(b, "largest_component_share_pct"), 2)});
      }
      t += tab.str() + "\n";
    }
    if (s.contains("matching")) {
      report::TextTable tab({"Feature matching summary", cand_.dataset.name, ref_.dataset.name});
      const auto &a = s["matching"]["candidate"], &b = s["matching"]["reference"];
      tab.add({"Count of segments", std::to_string(a["segments"].get<std::size_t>()),
               std::to_string(b["segments"].get<std::size_t>())});
      tab.add({"Count of matched segments", std::to_string(a["matched_segments"].get<std::size_t>()),
               std::to_string(b["matched_segments"].get<std::size_t>())});
      tab.add({"Percent matched segments", report::num(get(a, "pct_matched_segments"), 2),
               report::num(get(b, "pct_matched_segments"), 2)});
      tab.add({"Length of matched segments (km)", report::num(get(a, "matched_length_km")),
               report::num(get(b, "matched_length_km"))});
      tab.add({"Percent matched length", report::num(get(a, "pct_matched_length"), 2),
               report::num(get(b, "pct_matched_length"), 2)});
      auto local = [&](const nlohmann::json& j, const char* k) {
        const auto& v = j["local_pct_matched"][k];
        return v.is_null() ? std::string("-") : report::num(v.get<double>(), 2);
      };
      for (const auto& [label, key] : {std::pair{"Local min of % matched", "min"},
                                       {"Local max of % matched", "max"},
                                       {"Local average of % matched", "mean"}}) {
        tab.add({label, local(a, key), local(b, key)});
      }
      t += tab.str() + "\n";
    }
    if (s.contains("tags")) {
      report::TextTable tab({"Tag completeness (" + cand_.dataset.name + ")", "global %"});
      for (const auto& spec : cfg_.tags) tab.add({spec.name, report::num(get(s["tags"][spec.name], "global_pct"), 2)});
      t += tab.str() + "\n";
    }
    if (s.contains("autocorrelation")) {
      report::TextTable tab({"Global Moran's I", "weights", "I", "pseudo p"});
      for (const auto& [name, m] : s["autocorrelation"]["metrics"].items()) {
        if (!m.contains("global")) continue;
        for (const auto& [scheme, g] : m["global"].items()) {
          if (g.contains("skipped")) {
            tab.add({name, scheme, "skipped", "-"});
          } else {
            tab.add({name, scheme, report::num(g["I"].get<double>(), 4), report::num(g["pseudo_p"].get<double>(), 4)});
          }
        }
      }
      t += tab.str() + "\n";
    }
    for (const auto& w : result_.warnings) t += "warning: " + w + "\n";
    result_.text = t;
  }

  RunConfig cfg_;
  unsigned threads_;
  PipelineResult result_;
  Role cand_, ref_;
  MultiPolygon study_area_;
  std::vector<NamedPolygon> polygons_;
  std::map<std::string, double> population_;
  std::optional<HexGrid> grid_;
  std::optional<MatchResult> matches_;
  std::map<std::string, CellValues> metrics_;
  std::map<std::string, std::vector<nlohmann::json>> labels_;
};

inline PipelineResult run_pipeline(const RunConfig& cfg, Stage stage, unsigned threads = 1) {
  return Pipeline(cfg, threads).run(stage);
}

} // namespace netqa
