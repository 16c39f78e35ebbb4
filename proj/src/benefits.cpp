#include "cmcs/benefits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cmcs/tref.hpp"

namespace cmcs {

void Task::validate() const {
  if (std::abs(alpha + beta - 1.0) > 1e-9) throw std::invalid_argument("task " + id + ": alpha + beta != 1");
  if (team_size < 2) throw std::invalid_argument("task " + id + ": team_size must be >= 2");
  if (!(z_km > 0.0)) throw std::invalid_argument("task " + id + ": z must be > 0");
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("task " + id + ": zeta must lie in (0,1)");
  if (!(kappa > 0.0)) throw std::invalid_argument("task " + id + ": kappa must be > 0");
  if (!valid_coordinates(loc)) throw std::invalid_argument("task " + id + ": invalid location");
}

PairMatrix PairMatrix::restrict(std::span<const std::size_t> keep) const {
  PairMatrix out(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) out(a, b) = (*this)(keep[a], keep[b]);
  return out;
}

std::vector<CandidateEntry> candidate_team(const Task& task, std::span<const Worker> workers) {
  std::vector<CandidateEntry> out;
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const double d = haversine_km(task.loc, workers[i].loc);
    if (d < task.z_km) out.push_back({i, d});
  }
  std::sort(out.begin(), out.end(), [&](const CandidateEntry& a, const CandidateEntry& b) {
    return workers[a.worker].id < workers[b.worker].id;
  });
  return out;
}

std::vector<AbilityNorm> normalize_ability(std::span<const Worker> pool) {
  std::vector<AbilityNorm> out(pool.size());
  if (pool.empty()) return out;
  auto [len_lo, len_hi] = std::minmax_element(
      pool.begin(), pool.end(), [](const Worker& a, const Worker& b) { return a.len_km < b.len_km; });
  auto [num_lo, num_hi] = std::minmax_element(
      pool.begin(), pool.end(), [](const Worker& a, const Worker& b) { return a.num < b.num; });
  const double len_span = len_hi->len_km - len_lo->len_km;
  const double num_span = num_hi->num - num_lo->num;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out[i].len_norm = len_span > 0.0 ? (pool[i].len_km - len_lo->len_km) / len_span : 0.0;
    out[i].num_norm = num_span > 0.0 ? (pool[i].num - num_lo->num) / num_span : 0.0;
  }
  return out;
}

double ability_benefit(const AbilityNorm& norm, const Task& task, double epsilon) {
  return epsilon * (task.alpha * norm.len_norm + task.beta * norm.num_norm);
}

double distance_benefit(double d_km, double kappa, double z_km) {
  if (!(kappa > 0.0)) throw std::invalid_argument("distance_benefit: kappa must be > 0");
  if (d_km < 0.0 || d_km >= z_km) throw OutOfRange("distance_benefit: d must lie in [0, z)");
  return std::exp(-d_km / kappa);
}

double pair_effect(double a_i, double p_i, double a_j, double p_j, double s_ij) {
  return (a_i * p_i + a_j * p_j) * s_ij;
}

Ucrg Ucrg::restrict(std::span<const std::size_t> keep) const {
  Ucrg out;
  out.task = task;
  for (std::size_t k : keep) out.members.push_back(members.at(k));
  out.weight = weight.restrict(keep);
  out.trust = trust.restrict(keep);
  out.auc = auc.restrict(keep);
  if (value.size() == members.size()) out.value = value.restrict(keep);
  return out;
}

std::optional<std::size_t> Ucrg::local_index(std::size_t worker) const {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i].worker == worker) return i;
  return std::nullopt;
}

Ucrg build_ucrg(const Task& task, std::vector<MemberBenefit> members, PairMatrix trust, PairMatrix auc) {
  if (members.size() < task.team_size) {
    throw InfeasibleTask("task " + task.id + ": " + std::to_string(members.size()) +
                         " candidates for a team of " + std::to_string(task.team_size));
  }
  if (trust.size() != members.size() || auc.size() != members.size()) {
    throw std::invalid_argument("build_ucrg: pair tables do not match the member count");
  }
  Ucrg g;
  g.task = task;
  g.members = std::move(members);
  g.trust = std::move(trust);
  g.auc = std::move(auc);
  const std::size_t n = g.members.size();
  g.weight = PairMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.members[i].distance_km >= task.z_km) {
      throw std::invalid_argument("build_ucrg: member " + g.members[i].id + " outside range");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = g.members[i];
      const auto& b = g.members[j];
      const double u = pair_effect(a.ability, a.proximity, b.ability, b.proximity, g.trust(i, j));
      g.weight(i, j) = g.weight(j, i) = u;
    }
  }
  return g;
}

PairMatrix trust_benefits(const PairMatrix& value) {
  const std::size_t n = value.size();
  PairMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s(i, j) = trust_benefit(value(i, j), value(j, i));
  return s;
}

Ucrg build_task_ucrg(const Task& task, std::span<const Worker> workers,
                     const PairMatrix& worker_value, const PairMatrix& worker_auc, double epsilon) {
  const auto cands = candidate_team(task, workers);
  std::vector<Worker> pool;
  std::vector<std::size_t> idx;
  for (const auto& c : cands) {
    pool.push_back(workers[c.worker]);
    idx.push_back(c.worker);
  }
  const auto norms = normalize_ability(pool);
  std::vector<MemberBenefit> members;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    MemberBenefit m;
    m.worker = cands[k].worker;
    m.id = workers[m.worker].id;
    m.distance_km = cands[k].distance_km;
    m.ability = ability_benefit(norms[k], task, epsilon);
    m.proximity = distance_benefit(m.distance_km, task.kappa, task.z_km);
    members.push_back(std::move(m));
  }
  PairMatrix value = worker_value.restrict(idx);
  auto g = build_ucrg(task, std::move(members), trust_benefits(value), worker_auc.restrict(idx));
  g.value = std::move(value);
  return g;
}

double qod(std::span<const std::size_t> team, const PairMatrix& weight) {
  if (team.size() < 2) throw std::invalid_argument("qod: team needs at least two members");
  double total = 0.0;
  for (std::size_t a = 0; a < team.size(); ++a)
    for (std::size_t b = a + 1; b < team.size(); ++b) total += weight(team[a], team[b]);
  const double k = static_cast<double>(team.size());
  return 2.0 * total / (k * (k - 1.0));
}

double privacy_loss(std::span<const std::size_t> team, const PairMatrix& trust, const PairMatrix& auc) {
  if (team.size() < 2) throw std::invalid_argument("privacy_loss: team needs at least two members");
  double s_sum = 0.0;
  double auc_prod = 1.0;
  for (std::size_t a = 0; a < team.size(); ++a) {
    for (std::size_t b = 0; b < team.size(); ++b) {
      if (a == b) continue;
      auc_prod *= auc(team[a], team[b]);
      if (a < b) s_sum += 1.0 - trust(team[a], team[b]) / 6.0;
    }
  }
  const double denom = s_sum * (1.0 - auc_prod);
  if (denom <= 0.0) return 0.0;
  return std::exp(-static_cast<double>(team.size()) / denom);
}

void write_ucrg_csv(const Ucrg& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "i,j,U_ij,a_i,p_i,a_j,p_j,s_ij\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto& a = g.members[i];
      const auto& b = g.members[j];
      out << a.id << ',' << b.id << ',' << g.weight(i, j) << ',' << a.ability << ',' << a.proximity
          << ',' << b.ability << ',' << b.proximity << ',' << g.trust(i, j) << '\n';
    }
  }
}

}  // namespace cmcs
