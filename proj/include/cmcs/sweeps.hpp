#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmcs/baselines.hpp"
#include "cmcs/recruit.hpp"
#include "cmcs/scenario.hpp"

namespace cmcs {

enum class SweepKind { Tasks6Regions, Workers200To1200, TasksSequential, Kappa10To70, Convergence };

std::string sweep_name(SweepKind k);
SweepKind parse_sweep(std::string_view name);

struct SweepConfig {
  TabuConfig tabu;
  BaselineConfig base;
  /// Give DE/PSO/SA/VNS the evaluation budget TSR's neighborhood schedule uses.
  bool match_budget{true};
  std::size_t threads{1};  // concurrent solver instances; timings are cleanest at 1
};

struct SweepRow {
  std::string sweep;
  std::string algo;
  std::string setting;
  std::size_t region{0};
  std::string task;
  std::uint64_t seed{0};
  bool feasible{false};       // team recruited
  double qod{0.0};
  double pl{0.0};             // execution team
  std::size_t collab_size{0};
  double collab_pl{0.0};
  bool collab_feasible{false};
  double max_distance_km{0.0};  // farthest recruited member
  double z_km{0.0};
  double millis{0.0};
  std::string members;        // worker ids joined by ';'
};

/// TSR's evaluation count for `iterations` on a pool of n with team size k.
std::size_t tsr_budget(const TabuConfig& cfg, std::size_t n, std::size_t k);

/// One row per (algorithm, setting, seed), in setting-major, algorithm, seed order.
std::vector<SweepRow> run_sweep(SweepKind kind, const Scenario& s, std::span<const Algorithm> algos,
                                std::span<const std::uint64_t> seeds, const SweepConfig& cfg);

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace cmcs
