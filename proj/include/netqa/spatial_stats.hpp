#pragma once

// Spatial weights and Moran's I (global and local) with permutation
// inference. Every random draw comes from a stream seeded by (seed, unit key)
// or (seed, permutation index), so results do not depend on thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/parallel.hpp"

namespace netqa {

struct WeightsScheme {
  enum class Kind { Knn, DistanceBand };
  Kind kind = Kind::Knn;
  unsigned k = 6;
  double band = 0.0;  // m

  static WeightsScheme knn(unsigned k) { return {Kind::Knn, k, 0.0}; }
  static WeightsScheme distance_band(double d) { return {Kind::DistanceBand, 0, d}; }

  [[nodiscard]] std::string label() const {
    if (kind == Kind::Knn) return "knn" + std::to_string(k);
    std::ostringstream ss;
    ss << "band" << band;
    return ss.str();
  }

  /// "knn6", "knn12", "band1000", ...
  static WeightsScheme parse(const std::string& s) {
    try {
      if (s.rfind("knn", 0) == 0) {
        const int k = std::stoi(s.substr(3));
        if (k < 1) throw ConfigError("knn needs k >= 1");
        return knn(static_cast<unsigned>(k));
      }
      if (s.rfind("band", 0) == 0) {
        const double d = std::stod(s.substr(4));
        if (!(d > 0.0)) throw ConfigError("distance band must be > 0");
        return distance_band(d);
      }
    } catch (const std::logic_error&) {
    }
    throw ConfigError("unknown weights scheme '" + s + "' (expected knnK or bandD)");
  }
};

/// Row-standardized weights. Rows of isolated units are empty.
struct SpatialWeights {
  WeightsScheme scheme;
  std::vector<std::vector<std::size_t>> neighbors;
  std::vector<std::vector<double>> weights;
  std::vector<std::size_t> isolated;

  [[nodiscard]] std::size_t size() const { return neighbors.size(); }
  [[nodiscard]] double s0() const {
    double s = 0.0;
    for (const auto& row : weights) {
      for (double w : row) s += w;
    }
    return s;
  }
};

namespace detail {

/// Distances rounded to micrometres so that lattice ties compare equal and
/// fall back to the unit key.
inline std::int64_t distance_key(Point2D a, Point2D b) { return std::llround(distance(a, b) * 1e6); }

} // namespace detail

/// Neighbours by centroid distance; ties are broken by ascending unit key.
inline SpatialWeights build_weights(const std::vector<Point2D>& locations, const std::vector<std::uint64_t>& keys,
                                    const WeightsScheme& scheme, unsigned threads = 1) {
  const std::size_t n = locations.size();
  if (keys.size() != n) throw Error("build_weights: locations and keys differ in size");
  if (scheme.kind == WeightsScheme::Kind::Knn && n < static_cast<std::size_t>(scheme.k) + 1) {
    throw StatsError("knn with k=" + std::to_string(scheme.k) + " needs at least " + std::to_string(scheme.k + 1) +
                     " units, got " + std::to_string(n));
  }
  SpatialWeights w;
  w.scheme = scheme;
  w.neighbors.resize(n);
  w.weights.resize(n);
  const std::int64_t band_key = std::llround(scheme.band * 1e6);

  parallel_for(n, threads, [&](std::size_t i) {
    struct Cand {
      std::int64_t d;
      std::uint64_t key;
      std::size_t j;
    };
    std::vector<Cand> c;
    c.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto d = detail::distance_key(locations[i], locations[j]);
      if (scheme.kind == WeightsScheme::Kind::DistanceBand && d > band_key) continue;
      c.push_back({d, keys[j], j});
    }
    auto cmp = [](const Cand& a, const Cand& b) { return a.d != b.d ? a.d < b.d : a.key < b.key; };
    if (scheme.kind == WeightsScheme::Kind::Knn) {
      std::partial_sort(c.begin(), c.begin() + scheme.k, c.end(), cmp);
      c.resize(scheme.k);
    } else {
      std::sort(c.begin(), c.end(), cmp);
    }
    for (const auto& x : c) w.neighbors[i].push_back(x.j);
    w.weights[i].assign(c.size(), c.empty() ? 0.0 : 1.0 / static_cast<double>(c.size()));
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (w.neighbors[i].empty()) w.isolated.push_back(i);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Random streams

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t id) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ id));
}

/// Uniform integer in [0, range) by rejection; portable across standard
/// libraries, unlike std::uniform_int_distribution.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % range;
  }
}

inline constexpr std::uint64_t kGlobalDomain = 0x676c6f62616cull;  // "global"
inline constexpr std::uint64_t kLocalDomain = 0x6c6f63616cull;     // "local"

struct Standardized {
  std::vector<double> z;
  double mean = 0.0;
  double sd = 0.0;
};

/// z = (x - mean) / population standard deviation.
inline Standardized standardize(const std::vector<double>& x) {
  if (x.size() < 3) throw StatsError("Moran's I needs at least 3 observations");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw StatsError("Moran's I undefined: zero variance");
  Standardized s;
  const double n = static_cast<double>(x.size());
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / n);
  if (!(s.sd > 0.0) || !std::isfinite(s.sd)) throw StatsError("Moran's I undefined: zero variance");
  s.z.reserve(x.size());
  for (double v : x) s.z.push_back((v - s.mean) / s.sd);
  return s;
}

inline double spatial_lag(const SpatialWeights& w, const std::vector<double>& z, std::size_t i) {
  double lag = 0.0;
  const auto& nb = w.neighbors[i];
  const auto& wt = w.weights[i];
  for (std::size_t m = 0; m < nb.size(); ++m) lag += wt[m] * z[nb[m]];
  return lag;
}

inline double moran_statistic(const SpatialWeights& w, const std::vector<double>& z, double s0) {
  double cross_sum = 0.0, zz = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    cross_sum += z[i] * spatial_lag(w, z, i);
    zz += z[i] * z[i];
  }
  return static_cast<double>(z.size()) / s0 * cross_sum / zz;
}

} // namespace detail

struct MoranResult {
  double I = 0.0;
  double expected_I = 0.0;
  double pseudo_p = 1.0;
  unsigned n_permutations = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double sim_mean = 0.0;
  double sim_sd = 0.0;
};

/// Global Moran's I. The pseudo p-value is two-sided on |I - E[I]| with the
/// (count + 1) / (n_perm + 1) correction.
inline MoranResult global_moran(const std::vector<double>& values, const SpatialWeights& w, unsigned n_perm,
                                std::uint64_t seed, unsigned threads = 1) {
  if (values.size() != w.size()) throw Error("global_moran: values and weights differ in size");
  const auto std_values = detail::standardize(values);
  const auto& z = std_values.z;
  const double s0 = w.s0();
  if (!(s0 > 0.0)) throw StatsError("Moran's I undefined: every unit is isolated");

  MoranResult r;
  r.n = values.size();
  r.seed = seed;
  r.n_permutations = n_perm;
  r.expected_I = -1.0 / (static_cast<double>(r.n) - 1.0);
  r.I = detail::moran_statistic(w, z, s0);

  std::vector<double> sims(n_perm);
  parallel_for(n_perm, threads, [&](std::size_t p) {
    auto rng = detail::stream(seed, detail::kGlobalDomain, p);
    std::vector<double> zp = z;
    for (std::size_t i = zp.size() - 1; i > 0; --i) std::swap(zp[i], zp[detail::bounded(rng, i + 1)]);
    sims[p] = detail::moran_statistic(w, zp, s0);
  });

  const double observed = std::abs(r.I - r.expected_I);
  std::size_t extreme = 0;
  double sum = 0.0;
  for (double s : sims) {
    if (std::abs(s - r.expected_I) >= observed) ++extreme;
    sum += s;
  }
  r.pseudo_p = (static_cast<double>(extreme) + 1.0) / (static_cast<double>(n_perm) + 1.0);
  if (n_perm > 0) {
    r.sim_mean = sum / n_perm;
    double ss = 0.0;
    for (double s : sims) ss += (s - r.sim_mean) * (s - r.sim_mean);
    r.sim_sd = n_perm > 1 ? std::sqrt(ss / (n_perm - 1)) : 0.0;
  }
  return r;
}

enum class Quadrant { HH = 1, LH = 2, LL = 3, HL = 4 };

inline std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::HH:
      return "HH";
    case Quadrant::LH:
      return "LH";
    case Quadrant::LL:
      return "LL";
    default:
      return "HL";
  }
}

inline constexpr double kDefaultAlpha = 0.05;

struct LisaResult {
  std::vector<double> z;
  std::vector<double> lag;
  std::vector<double> local_I;
  std::vector<double> pseudo_p;
  std::vector<Quadrant> quadrant;
  std::vector<bool> significant;
  double alpha = kDefaultAlpha;
  unsigned n_permutations = 0;
  std::uint64_t seed = 0;
};

/// Local Moran's I_i = z_i * sum_j w_ij z_j on population-standardized
/// values, so that sum_i I_i = S0 * I_global.
///
/// Inference uses conditional permutation: z_i stays fixed while its
/// neighbour slots are filled with a random draw (without replacement) from
/// the other units. The pseudo p-value is folded: the smaller tail of
/// simulations at least as large as the observed value, with the +1
/// correction. Units with no neighbours get p = 1.
inline LisaResult local_moran(const std::vector<double>& values, const SpatialWeights& w,
                              const std::vector<std::uint64_t>& keys, unsigned n_perm, std::uint64_t seed,
                              double alpha = kDefaultAlpha, unsigned threads = 1) {
  const std::size_t n = values.size();
  if (w.size() != n || keys.size() != n) throw Error("local_moran: values, weights and keys differ in size");
  const auto std_values = detail::standardize(values);

  LisaResult r;
  r.z = std_values.z;
  r.alpha = alpha;
  r.n_permutations = n_perm;
  r.seed = seed;
  r.lag.resize(n);
  r.local_I.resize(n);
  r.pseudo_p.assign(n, 1.0);
  r.quadrant.resize(n);
  std::vector<char> significant(n, 0);  // vector<bool> bits are not safe to write concurrently

  const auto& z = r.z;
  parallel_for(n, threads, [&](std::size_t i) {
    const double lag = detail::spatial_lag(w, z, i);
    r.lag[i] = lag;
    r.local_I[i] = z[i] * lag;
    const bool zp = z[i] > 0.0, lp = lag > 0.0;
    r.quadrant[i] = zp ? (lp ? Quadrant::HH : Quadrant::HL) : (lp ? Quadrant::LH : Quadrant::LL);

    const auto& wt = w.weights[i];
    const std::size_t k = wt.size();
    if (k == 0 || n_perm == 0) return;

    auto rng = detail::stream(seed, detail::kLocalDomain, keys[i]);
    std::vector<std::size_t> draw;
    draw.reserve(k);
    const std::uint64_t pool = n - 1;  // every unit but i
    std::size_t larger = 0;
    for (unsigned p = 0; p < n_perm; ++p) {
      // Floyd's sampling of k distinct slots from [0, pool).
      draw.clear();
      for (std::uint64_t j = pool - k; j < pool; ++j) {
        const std::size_t t = detail::bounded(rng, j + 1);
        const bool taken = std::find(draw.begin(), draw.end(), t) != draw.end();
        draw.push_back(taken ? static_cast<std::size_t>(j) : t);
      }
      double sim_lag = 0.0;
      for (std::size_t m = 0; m < k; ++m) {
        const std::size_t other = draw[m] >= i ? draw[m] + 1 : draw[m];
        sim_lag += wt[m] * z[other];
      }
      if (z[i] * sim_lag >= r.local_I[i]) ++larger;
    }
    if (n_perm - larger < larger) larger = n_perm - larger;
    r.pseudo_p[i] = (static_cast<double>(larger) + 1.0) / (static_cast<double>(n_perm) + 1.0);
    significant[i] = r.pseudo_p[i] <= alpha;
  });
  r.significant.assign(significant.begin(), significant.end());
  return r;
}

} // namespace netqa
