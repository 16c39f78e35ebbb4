#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cmcs/benefits.hpp"
#include "cmcs/graph_store.hpp"
#include "cmcs/region_partition.hpp"
#include "cmcs/tref.hpp"

namespace cmcs {

/// One task with its own worker pool and pair tables.
struct Instance {
  Task task;
  std::vector<Worker> workers;
  PairMatrix value;  // t_{i->j} over workers
  PairMatrix auc;    // AUC_{i->j} over workers

  Ucrg ucrg() const { return build_task_ucrg(task, workers, value, auc); }
};

struct InstanceParams {
  std::size_t candidates{200};
  std::size_t team_size{10};
  double radius_km{50.0};  // workers placed uniformly in a disc of this radius
  double kappa{10.0};
  double z_km{200.0};
  double zeta{0.7};
  double max_len_km{500.0};
  double max_num{100.0};
  double auc_lo{0.6};
  double auc_hi{0.95};
  /// true: each worker draws a latent level and t_{i->j} is the trustee's
  /// level shifted by -1/0/+1 (probabilities 1/4, 1/2, 1/4), clamped.
  /// false: every ordered pair draws its level independently.
  bool reputation_trust{true};
  LatLon center{30.0, 120.0};
};

/// Workers around a task with random histories, trust levels and AUCs.
Instance random_instance(const InstanceParams& p, std::uint64_t seed);

/// Point `dist_km` away from `from` along `bearing_rad`.
LatLon destination(const LatLon& from, double dist_km, double bearing_rad);

struct ScenarioParams {
  std::size_t regions{6};            // regions that receive workers and tasks
  std::size_t workers_per_region{200};
  std::size_t tasks_per_region{1};
  std::size_t team_size{10};
  double alpha{0.2};
  double beta{0.8};
  double kappa{10.0};
  double z_km{200.0};
  double zeta{0.7};
  std::uint64_t seed{1};
};

/// One edge-server region: its workers, their pair tables and its tasks.
struct RegionBlock {
  Region region;
  std::vector<Worker> workers;
  PairMatrix value;  // t_{i->j} over this block's workers
  PairMatrix auc;
  std::vector<Task> tasks;

  Instance instance(std::size_t task) const { return {tasks.at(task), workers, value, auc}; }
};

struct Scenario {
  std::vector<RegionBlock> blocks;
  std::uint64_t seed{0};
};

/// Workers and tasks placed uniformly inside the boxes of the first
/// `p.regions` regions with non-zero area; each worker is bound to a distinct trust
/// node by a seeded bijection and to a check-in user whose history supplies
/// len and num. Trust values come from observed edges where present and the
/// model otherwise. Throws std::invalid_argument when there are more workers
/// than trust nodes.
Scenario build_scenario(const TrustEvaluator& trust, std::span<const CheckIn> checkins,
                        std::span<const Region> regions, const ScenarioParams& p);

/// Self-contained scenario with synthetic regions (about 1 degree square) and
/// pair tables drawn as in random_instance.
Scenario synthetic_scenario(const ScenarioParams& p);

}  // namespace cmcs
