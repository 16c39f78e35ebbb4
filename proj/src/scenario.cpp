#include "cmcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cmcs/embed_init.hpp"

namespace cmcs {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string padded(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06zu", prefix, i);
  return buf;
}

void random_pair_tables(std::size_t n, const InstanceParams& p, std::mt19937_64& rng, PairMatrix& value,
                        PairMatrix& auc) {
  std::uniform_int_distribution<int> level(0, static_cast<int>(kNumLevels) - 1);
  std::discrete_distribution<int> shift({1.0, 2.0, 1.0});
  std::uniform_real_distribution<double> acc(p.auc_lo, p.auc_hi);
  std::vector<int> reputation(n);
  for (auto& r : reputation) r = level(rng);
  value = PairMatrix(n);
  auc = PairMatrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int l = p.reputation_trust ? std::clamp(reputation[j] + shift(rng) - 1, 0, int(kNumLevels) - 1)
                                       : level(rng);
      value(i, j) = trust_value(level_from_index(static_cast<std::size_t>(l)));
      auc(i, j) = acc(rng);
    }
}

LatLon uniform_in_box(const Region& r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(r.lat_min, r.lat_max);
  std::uniform_real_distribution<double> lon(r.lon_min, r.lon_max);
  const double a = r.lat_max > r.lat_min ? lat(rng) : r.lat_min;
  const double b = r.lon_max > r.lon_min ? lon(rng) : r.lon_min;
  return {a, b};
}

Task make_task(const ScenarioParams& p, std::size_t index, const LatLon& loc) {
  Task t;
  t.id = padded('t', index);
  t.loc = loc;
  t.alpha = p.alpha;
  t.beta = p.beta;
  t.zeta = p.zeta;
  t.team_size = p.team_size;
  t.z_km = p.z_km;
  t.kappa = p.kappa;
  t.validate();
  return t;
}

}  // namespace

LatLon destination(const LatLon& from, double dist_km, double bearing_rad) {
  const double delta = dist_km / kEarthRadiusKm;
  const double lat1 = from.lat * kDeg;
  const double lon1 = from.lon * kDeg;
  const double lat2 =
      std::asin(std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(bearing_rad));
  const double lon2 = lon1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  double lon = lon2 / kDeg;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return {lat2 / kDeg, lon};
}

Instance random_instance(const InstanceParams& p, std::uint64_t seed) {
  if (p.candidates < p.team_size) throw std::invalid_argument("random_instance: fewer candidates than team size");
  if (!(p.radius_km < p.z_km)) throw std::invalid_argument("random_instance: radius must be below z");
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.task.id = "t0";
  inst.task.loc = p.center;
  inst.task.team_size = p.team_size;
  inst.task.kappa = p.kappa;
  inst.task.z_km = p.z_km;
  inst.task.zeta = p.zeta;
  inst.task.validate();

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < p.candidates; ++i) {
    Worker w;
    w.id = padded('w', i);
    w.loc = destination(p.center, p.radius_km * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
    w.len_km = p.max_len_km * u(rng);
    w.num = std::floor(p.max_num * u(rng));
    w.trust_node = static_cast<NodeIndex>(i);
    inst.workers.push_back(std::move(w));
  }
  random_pair_tables(p.candidates, p, rng, inst.value, inst.auc);
  return inst;
}

Scenario build_scenario(const TrustEvaluator& trust, std::span<const CheckIn> checkins,
                        std::span<const Region> regions, const ScenarioParams& p) {
  std::vector<const Region*> usable;
  for (const auto& r : regions)
    if (r.lat_max > r.lat_min || r.lon_max > r.lon_min) usable.push_back(&r);
  if (usable.size() < p.regions) throw std::invalid_argument("build_scenario: not enough regions with area");
  const std::size_t total = p.regions * p.workers_per_region;
  if (total > trust.num_nodes()) {
    throw std::invalid_argument("build_scenario: " + std::to_string(total) + " workers but only " +
                                std::to_string(trust.num_nodes()) + " trust nodes");
  }
  const auto history = worker_history(checkins);
  if (history.empty()) throw std::invalid_argument("build_scenario: no check-in histories");

  std::mt19937_64 rng(p.seed);
  std::vector<NodeIndex> nodes(trust.num_nodes());
  for (NodeIndex i = 0; i < nodes.size(); ++i) nodes[i] = i;
  std::shuffle(nodes.begin(), nodes.end(), rng);
  std::vector<const std::pair<const std::string, WorkerHistory>*> users;
  for (const auto& kv : history) users.push_back(&kv);
  std::shuffle(users.begin(), users.end(), rng);

  Scenario s;
  s.seed = p.seed;
  std::size_t next = 0, task_index = 0;
  for (std::size_t r = 0; r < p.regions; ++r) {
    RegionBlock b;
    b.region = *usable[r];
    b.region.members.clear();
    for (std::size_t i = 0; i < p.workers_per_region; ++i, ++next) {
      Worker w;
      w.id = padded('w', next);
      w.loc = uniform_in_box(b.region, rng);
      const auto& user = *users[next % users.size()];
      w.len_km = user.second.len_km;
      w.num = static_cast<double>(user.second.num);
      w.trust_node = nodes[next];
      b.workers.push_back(std::move(w));
    }
    const std::size_t n = b.workers.size();
    b.value = PairMatrix(n);
    b.auc = PairMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto a = b.workers[i].trust_node, c = b.workers[j].trust_node;
        b.value(i, j) = trust_value(trust.level_between(a, c));
        b.auc(i, j) = pair_auc(a, c, trust.observed(), trust.accuracy());
      }
    for (std::size_t t = 0; t < p.tasks_per_region; ++t) {
      b.tasks.push_back(make_task(p, task_index++, uniform_in_box(b.region, rng)));
    }
    s.blocks.push_back(std::move(b));
  }
  return s;
}

Scenario synthetic_scenario(const ScenarioParams& p) {
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> lat(20.0, 50.0), lon(-120.0, -70.0), u(0.0, 1.0);
  InstanceParams tables;
  Scenario s;
  s.seed = p.seed;
  std::size_t next = 0, task_index = 0;
  for (std::size_t r = 0; r < p.regions; ++r) {
    RegionBlock b;
    b.region.id = r;
    b.region.centroid = {lat(rng), lon(rng)};
    b.region.lat_min = b.region.centroid.lat - 0.5;
    b.region.lat_max = b.region.centroid.lat + 0.5;
    b.region.lon_min = b.region.centroid.lon - 0.5;
    b.region.lon_max = b.region.centroid.lon + 0.5;
    for (std::size_t i = 0; i < p.workers_per_region; ++i, ++next) {
      Worker w;
      w.id = padded('w', next);
      w.loc = uniform_in_box(b.region, rng);
      w.len_km = tables.max_len_km * u(rng);
      w.num = std::floor(tables.max_num * u(rng));
      w.trust_node = static_cast<NodeIndex>(next);
      b.workers.push_back(std::move(w));
    }
    random_pair_tables(b.workers.size(), tables, rng, b.value, b.auc);
    for (std::size_t t = 0; t < p.tasks_per_region; ++t) {
      b.tasks.push_back(make_task(p, task_index++, uniform_in_box(b.region, rng)));
    }
    s.blocks.push_back(std::move(b));
  }
  return s;
}

}  // namespace cmcs
