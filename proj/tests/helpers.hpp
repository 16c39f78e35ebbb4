// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "cmcs/benefits.hpp"
#include "cmcs/geo.hpp"
#include "cmcs/graph_store.hpp"
#include "cmcs/recruit.hpp"

namespace testing {

using namespace cmcs;

inline TrustGraph make_graph(std::initializer_list<std::tuple<const char*, const char*, TrustLevel>> edges) {
  TrustGraph g;
  for (const auto& [a, b, l] : edges) {
    const auto u = g.add_node(a);
    const auto v = g.add_node(b);
    g.set_edge(u, v, l);
  }
  return g;
}

inline TrustGraph random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> lvl(0, 3);
  TrustGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "n%03zu", i);
    g.add_node(id);
  }
  for (NodeIndex a = 0; a < n; ++a)
    for (NodeIndex b = 0; b < n; ++b)
      if (a != b && u(rng) < density) g.set_edge(a, b, level_from_index(static_cast<std::size_t>(lvl(rng))));
  return g;
}

inline std::string member_id(std::size_t i) {
  char id[32];
  std::snprintf(id, sizeof id, "m%03zu", i);
  return id;
}

/// UCRG straight from a symmetric weight table (distances 0, unit trust, AUC 0.8).
/// The weight diagonal is cleared.
inline Ucrg weighted_ucrg(const PairMatrix& w, std::size_t team_size) {
  Ucrg g;
  g.task.id = "t";
  g.task.team_size = team_size;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) g.members.push_back({i, member_id(i), 0.0, 1.0, 1.0});
  g.weight = w;
  g.trust = PairMatrix(n, 1.0);
  g.auc = PairMatrix(n, 0.8);
  g.value = PairMatrix(n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    g.weight(i, i) = 0.0;
    g.trust(i, i) = 0.0;
    g.auc(i, i) = 0.0;
    g.value(i, i) = 0.0;
  }
  return g;
}

inline PairMatrix random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  PairMatrix w(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
  return w;
}

/// Mean over ordered pairs, written out directly.
inline double oracle_qod(const std::vector<std::size_t>& team, const PairMatrix& w) {
  double s = 0.0;
  for (auto i : team)
    for (auto j : team)
      if (i != j) s += w(i, j);
  const double k = static_cast<double>(team.size());
  return s / (k * (k - 1.0));
}

/// Exhaustive maximum by bitmask (n <= 20).
inline double oracle_best_qod(const PairMatrix& w, std::size_t k) {
  const std::size_t n = w.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> team;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) team.push_back(i);
    best = std::max(best, oracle_qod(team, w));
  }
  return best;
}

/// Plain Lloyd iterations with haversine assignment and arithmetic-mean
/// updates, seeded from k distinct points. Returns per-step inertia (km^2).
struct LloydResult {
  std::vector<LatLon> centroids;
  std::vector<double> inertia_trace;
};

inline LloydResult lloyd(const std::vector<LatLon>& pts, std::size_t k, std::uint64_t seed, std::size_t steps = 100) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  LloydResult r;
  for (std::size_t c = 0; c < k; ++c) r.centroids.push_back(pts[idx[c]]);
  std::vector<std::size_t> assign(pts.size());
  for (std::size_t step = 0; step < steps; ++step) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = haversine_km(pts[i], r.centroids[c]);
        if (d < best) {
          best = d;
          assign[i] = c;
        }
      }
      inertia += best * best;
    }
    r.inertia_trace.push_back(inertia);
    std::vector<double> lat(k, 0.0), lon(k, 0.0), cnt(k, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lat[assign[i]] += pts[i].lat;
      lon[assign[i]] += pts[i].lon;
      cnt[assign[i]] += 1.0;
    }
    bool moved = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (cnt[c] == 0.0) continue;
      const LatLon m{lat[c] / cnt[c], lon[c] / cnt[c]};
      moved |= !(m == r.centroids[c]);
      r.centroids[c] = m;
    }
    if (!moved) break;
  }
  return r;
}

inline double lloyd_inertia(const std::vector<LatLon>& pts, const std::vector<LatLon>& cs) {
  double s = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cs) best = std::min(best, haversine_km(p, c));
    s += best * best;
  }
  return s;
}

/// Gaussian blobs with centres on a ring of the given radius (degrees).
inline std::vector<LatLon> blobs(std::size_t n_blobs, std::size_t per_blob, double sigma, double spread,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<LatLon> pts;
  for (std::size_t b = 0; b < n_blobs; ++b) {
    const double a = 2.0 * 3.141592653589793 * static_cast<double>(b) / static_cast<double>(n_blobs);
    const LatLon c{10.0 + spread * std::sin(a), 20.0 + spread * std::cos(a)};
    for (std::size_t i = 0; i < per_blob; ++i) pts.push_back({c.lat + noise(rng), c.lon + noise(rng)});
  }
  return pts;
}

/// Pr by direct enumeration of ordered pairs and two-hop paths.
struct PrCount {
  std::size_t qualifying{0};
  std::size_t matches{0};
};

inline PrCount oracle_pr(const TrustGraph& g) {
  PrCount c;
  const auto n = static_cast<NodeIndex>(g.num_nodes());
  for (NodeIndex a = 0; a < n; ++a)
    for (NodeIndex t = 0; t < n; ++t) {
      if (a == t) continue;
      const auto direct = g.level(a, t);
      if (!direct) continue;
      std::size_t paths = 0;
      std::size_t best = 0;
      for (NodeIndex b = 0; b < n; ++b) {
        if (b == a || b == t) continue;
        const auto ab = g.level(a, b), bt = g.level(b, t);
        if (!ab || !bt) continue;
        ++paths;
        best = std::max(best, std::min(level_index(*ab), level_index(*bt)));
      }
      if (paths < 2) continue;
      ++c.qualifying;
      if (level_index(*direct) == best) ++c.matches;
    }
  return c;
}

}  // namespace testing
