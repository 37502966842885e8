#pragma once

// Output encoding: GeoJSON layers, CSV tables and fixed-precision text.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netqa/completeness.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/hex_grid.hpp"

namespace netqa::report {

using nlohmann::json;

inline json coords(Point2D p) { return json::array({p.x, p.y}); }

inline json line_geometry(std::span<const Point2D> pts) {
  json c = json::array();
  for (const auto& p : pts) c.push_back(coords(p));
  return {{"type", "LineString"}, {"coordinates", c}};
}

inline json point_geometry(Point2D p) { return {{"type", "Point"}, {"coordinates", coords(p)}}; }

inline json hex_geometry(const HexCell& cell) {
  json ring = json::array();
  for (const auto& p : cell.polygon) ring.push_back(coords(p));
  ring.push_back(coords(cell.polygon.front()));
  return {{"type", "Polygon"}, {"coordinates", json::array({ring})}};
}

inline json feature(json geometry, json properties) {
  return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(properties)}};
}

inline json collection(std::string name, json features) {
  return {{"type", "FeatureCollection"}, {"name", std::move(name)}, {"features", std::move(features)}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Compact JSON for geodata layers, indented for the summary.
inline std::string dump_layer(const json& j) { return j.dump() + "\n"; }
inline std::string dump_pretty(const json& j) { return j.dump(2) + "\n"; }

/// printf-style fixed formatting, locale independent for the C locale.
inline std::string num(double v, int precision = 3) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

/// Round-trip precision for CSV columns.
inline std::string exact(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CellStats {
  std::size_t count = 0;
  std::optional<double> min, max, mean;

  [[nodiscard]] json to_json() const {
    return {{"cells", count}, {"min", optional_number(min)}, {"max", optional_number(max)},
            {"mean", optional_number(mean)}};
  }
};

inline CellStats cell_stats(const CellValues& v) {
  CellStats s;
  double sum = 0.0;
  for (const auto& x : v) {
    if (!x) continue;
    ++s.count;
    sum += *x;
    s.min = s.min ? std::min(*s.min, *x) : *x;
    s.max = s.max ? std::max(*s.max, *x) : *x;
  }
  if (s.count) s.mean = sum / static_cast<double>(s.count);
  return s;
}

/// Left-aligned label column followed by right-aligned value columns.
class TextTable {
public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  [[nodiscard]] std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      width.resize(std::max(width.size(), r.size()), 0);
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      for (std::size_t c = 0; c < r.size(); ++c) {
        const std::string pad(width[c] - r[c].size(), ' ');
        out += c == 0 ? r[c] + pad : "  " + pad + r[c];
      }
      out += "\n";
      if (i == 0) {
        std::size_t total = 0;
        for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
        out += std::string(total, '-') + "\n";
      }
    }
    return out;
  }

private:
  std::vector<std::vector<std::string>> rows_;
};

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes all files into `dir`. If any write fails, files already written
/// by this call are removed before the error propagates.
inline void write_outputs(const std::vector<OutputFile>& files, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  try {
    for (const auto& f : files) {
      const auto path = dir / f.name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + path.string());
      written.push_back(path);
      out << f.content;
      if (!out) throw Error("write failed for " + path.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

} // namespace netqa::report
