#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmcs/benefits.hpp"

namespace cmcs {

struct TabuConfig {
  std::size_t iterations{500};
  std::size_t tenure{200};
  std::size_t neighborhood_sample{512};
  std::size_t full_neighborhood_max{60};  // enumerate every swap up to this many candidates
  std::uint64_t seed{1};
  /// true: move only to a strictly better non-tabu neighbor (stalls at the
  /// first local optimum). false: move to the best non-tabu neighbor even if
  /// worse, so the search can leave local optima.
  bool strict_improvement{false};

  void validate() const;
};

/// Result of one solver run. Teams are sorted local member indices.
struct SolverResult {
  std::vector<std::size_t> team;
  double qod{0.0};
  std::vector<double> trace;  // best QoD after each iteration
  std::size_t iterations{0};
  std::size_t evaluations{0};  // candidate teams scored
  double initial_qod{0.0};
  std::vector<std::pair<double, double>> progress;  // (elapsed ms, best QoD) at each improvement
};

SolverResult tsr_recruit(const Ucrg& g, const TabuConfig& cfg);

/// Exact maximizer by enumeration; ties keep the lexicographically first team.
/// Throws std::invalid_argument when C(n, k) > 1e6.
SolverResult brute_force_recruit(const Ucrg& g, std::size_t team_size);

struct CollaborationTeam {
  std::vector<std::size_t> team;  // empty when infeasible
  double pl{0.0};                 // of the last team examined
  bool feasible{false};
  std::vector<double> pl_trajectory;  // pl after each step, starting with the full team
};

/// Drops the member with the lowest mean s to the rest until pl <= zeta or
/// two members remain.
CollaborationTeam select_collaboration_team(std::span<const std::size_t> team, const Task& task,
                                            const PairMatrix& trust, const PairMatrix& auc);

struct ConflictResolution {
  std::vector<std::vector<std::size_t>> teams;  // worker indices, sorted; empty = unfilled
  std::vector<bool> filled;
  std::size_t rounds{0};
};

/// `teams[t]` holds worker indices recruited for `ucrgs[t]`. While some worker
/// sits in several teams, the team with the largest summed U to that worker
/// keeps it and every other holder re-runs tsr_recruit without workers taken
/// elsewhere.
ConflictResolution resolve_conflicts(std::span<const Ucrg> ucrgs,
                                     std::vector<std::vector<std::size_t>> teams, const TabuConfig& cfg);

struct RecruitmentOutcome {
  std::string task_id;
  std::vector<std::size_t> execution_team;      // worker indices
  std::vector<std::size_t> collaboration_team;  // worker indices
  double qod{0.0};
  double pl{0.0};
  bool filled{false};
  bool feasible{false};  // collaboration team meets zeta
  std::size_t iterations_used{0};
  std::vector<double> best_qod_trace;
  double millis{0.0};
};

/// Per-task TSR (one concurrent solve per task), conflict resolution, then
/// collaboration-team selection. Tasks with too few candidates come back unfilled.
std::vector<RecruitmentOutcome> recruit_tasks(std::span<const Task> tasks, std::span<const Worker> workers,
                                              const PairMatrix& worker_value, const PairMatrix& worker_auc,
                                              const TabuConfig& cfg);

}  // namespace cmcs
