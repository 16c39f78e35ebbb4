#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cmcs/benefits.hpp"
#include "cmcs/recruit.hpp"

namespace cmcs {

enum class Algorithm { TSR, DE, PSO, VNS, SA, GMPL, GMDB, GMAB, Random };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::TSR,  Algorithm::DE,   Algorithm::PSO,
                                               Algorithm::VNS,  Algorithm::SA,   Algorithm::GMPL,
                                               Algorithm::GMDB, Algorithm::GMAB, Algorithm::Random};

std::string algorithm_name(Algorithm a);  // lower case, as on the command line
Algorithm parse_algorithm(std::string_view name);
std::vector<Algorithm> parse_algorithm_list(std::string_view csv);

struct BaselineConfig {
  std::size_t population{30};   // DE population / PSO swarm
  std::size_t iterations{200};  // generations, temperature levels or VNS shakes
  std::size_t max_evaluations{0};  // when > 0, stop on this many scored teams instead
  double de_f{0.5};
  double de_cr{0.9};
  double pso_w{0.7};
  double pso_c1{1.5};
  double pso_c2{1.5};
  double pso_vmax{0.5};
  double sa_t0{0.0};  // 0 = the initial team's QoD
  double sa_cooling{0.95};
  std::size_t sa_moves_per_temp{50};
  std::size_t vns_max_m{3};
  std::uint64_t seed{1};

  void validate() const;
};

SolverResult de_recruit(const Ucrg& g, const BaselineConfig& cfg);
SolverResult pso_recruit(const Ucrg& g, const BaselineConfig& cfg);
SolverResult vns_recruit(const Ucrg& g, const BaselineConfig& cfg);
SolverResult sa_recruit(const Ucrg& g, const BaselineConfig& cfg);

/// Top team_size by mean trust value to and from all other candidates.
SolverResult gmpl_recruit(const Ucrg& g);
/// Top team_size closest to the task.
SolverResult gmdb_recruit(const Ucrg& g);
/// Top team_size by ability benefit.
SolverResult gmab_recruit(const Ucrg& g);
SolverResult random_recruit(const Ucrg& g, std::uint64_t seed);

SolverResult solve(Algorithm a, const Ucrg& g, const BaselineConfig& base, const TabuConfig& tabu);

}  // namespace cmcs
