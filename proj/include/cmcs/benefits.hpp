#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmcs/geo.hpp"
#include "cmcs/graph_store.hpp"

namespace cmcs {

struct Worker {
  std::string id;
  LatLon loc;
  double len_km{0.0};  // total historical mileage
  double num{0.0};     // tasks completed historically
  NodeIndex trust_node{0};
};

struct Task {
  std::string id;
  LatLon loc;
  double alpha{0.2};
  double beta{0.8};
  double zeta{0.7};           // privacy-loss threshold
  std::size_t team_size{10};
  double z_km{200.0};         // maximum recruitment range
  double kappa{10.0};         // distance attenuation ratio

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

class InfeasibleTask : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense symmetric-or-directed n x n table indexed by local member position.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }

  /// Sub-table over `keep` (in the given order).
  PairMatrix restrict(std::span<const std::size_t> keep) const;

 private:
  std::size_t n_{0};
  std::vector<double> v_;
};

struct CandidateEntry {
  std::size_t worker{0};  // index into the worker list
  double distance_km{0.0};
};

/// Workers strictly inside the recruitment range, sorted by worker id.
std::vector<CandidateEntry> candidate_team(const Task& task, std::span<const Worker> workers);

struct AbilityNorm {
  double len_norm{0.0};
  double num_norm{0.0};
};

/// Min-max normalization over `pool`; a constant field maps to 0 for everyone.
std::vector<AbilityNorm> normalize_ability(std::span<const Worker> pool);

/// epsilon * (alpha * len_norm + beta * num_norm).
double ability_benefit(const AbilityNorm& norm, const Task& task, double epsilon = 1.0);

/// exp(-d / kappa); throws OutOfRange when d >= z or d < 0.
double distance_benefit(double d_km, double kappa, double z_km);

/// (a_i p_i + a_j p_j) * s_ij.
double pair_effect(double a_i, double p_i, double a_j, double p_j, double s_ij);

struct MemberBenefit {
  std::size_t worker{0};
  std::string id;
  double distance_km{0.0};
  double ability{0.0};   // a_iy
  double proximity{0.0}; // p_iy
};

/// Undirected complete recruitment graph over a task's candidates. Members are
/// ordered by id, so local index order is the lexicographic tie-break order.
struct Ucrg {
  Task task;
  std::vector<MemberBenefit> members;
  PairMatrix weight;  // U_ij, symmetric, zero diagonal
  PairMatrix trust;   // s_ij, symmetric
  PairMatrix auc;     // AUC_{i->j}, directed
  PairMatrix value;   // t_{i->j}, directed; empty when only s is known

  std::size_t size() const { return members.size(); }

  /// Sub-graph over the given local members (order preserved).
  Ucrg restrict(std::span<const std::size_t> keep) const;

  /// Index of the member bound to `worker`, if present.
  std::optional<std::size_t> local_index(std::size_t worker) const;
};

/// Builds U from the member benefits and pairwise s. Throws InfeasibleTask if
/// there are fewer candidates than task.team_size.
Ucrg build_ucrg(const Task& task, std::vector<MemberBenefit> members, PairMatrix trust, PairMatrix auc);

/// Full pipeline for one task: candidates, ability normalization over the
/// candidate pool, distance benefits, s from the directed trust values, and U.
/// Pair tables are indexed by worker index.
Ucrg build_task_ucrg(const Task& task, std::span<const Worker> workers,
                     const PairMatrix& worker_value, const PairMatrix& worker_auc,
                     double epsilon = 1.0);

/// (t_ij + t_ji) * exp(-|t_ij - t_ji|) for every ordered pair; zero diagonal.
PairMatrix trust_benefits(const PairMatrix& value);

/// Mean U over ordered member pairs. Throws std::invalid_argument for |team| < 2.
double qod(std::span<const std::size_t> team, const PairMatrix& weight);
inline double qod(std::span<const std::size_t> team, const Ucrg& g) { return qod(team, g.weight); }

/// exp(-|team| / (S * P)) with S the sum over unordered pairs of (1 - s/6) and
/// P = 1 - product over ordered pairs of AUC. Zero when S * P = 0.
double privacy_loss(std::span<const std::size_t> team, const PairMatrix& trust, const PairMatrix& auc);

struct TeamScore {
  std::vector<std::size_t> team;
  double qod{0.0};
  std::optional<double> pl;
};

/// Rows `i,j,U_ij,a_i,p_i,a_j,p_j,s_ij` for i < j (member ids).
void write_ucrg_csv(const Ucrg& g, const std::filesystem::path& path);

}  // namespace cmcs
