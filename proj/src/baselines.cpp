#include "cmcs/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "team_state.hpp"

namespace cmcs {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::TSR: return "tsr";
    case Algorithm::DE: return "de";
    case Algorithm::PSO: return "pso";
    case Algorithm::VNS: return "vns";
    case Algorithm::SA: return "sa";
    case Algorithm::GMPL: return "gmpl";
    case Algorithm::GMDB: return "gmdb";
    case Algorithm::GMAB: return "gmab";
    case Algorithm::Random: return "random";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto a : kAllAlgorithms)
    if (algorithm_name(a) == lower) return a;
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

std::vector<Algorithm> parse_algorithm_list(std::string_view csv) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto end = std::min(csv.find(',', start), csv.size());
    const auto item = csv.substr(start, end - start);
    if (!item.empty()) out.push_back(parse_algorithm(item));
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty algorithm list");
  return out;
}

void BaselineConfig::validate() const {
  if (population < 4) throw std::invalid_argument("BaselineConfig: population must be >= 4");
  if (iterations < 1) throw std::invalid_argument("BaselineConfig: iterations must be >= 1");
  if (!(de_f > 0.0 && de_f <= 2.0)) throw std::invalid_argument("BaselineConfig: de_f must lie in (0,2]");
  if (!(de_cr >= 0.0 && de_cr <= 1.0)) throw std::invalid_argument("BaselineConfig: de_cr must lie in [0,1]");
  if (!(pso_w >= 0.0 && pso_w < 1.0)) throw std::invalid_argument("BaselineConfig: pso_w must lie in [0,1)");
  if (pso_c1 < 0.0 || pso_c2 < 0.0 || !(pso_vmax > 0.0)) throw std::invalid_argument("BaselineConfig: PSO rates");
  if (sa_t0 < 0.0) throw std::invalid_argument("BaselineConfig: sa_t0 must be >= 0");
  if (!(sa_cooling > 0.0 && sa_cooling < 1.0)) throw std::invalid_argument("BaselineConfig: sa_cooling in (0,1)");
  if (sa_moves_per_temp < 1) throw std::invalid_argument("BaselineConfig: sa_moves_per_temp must be >= 1");
  if (vns_max_m < 1) throw std::invalid_argument("BaselineConfig: vns_max_m must be >= 1");
}

namespace {

/// Tracks the best team and the evaluation count against the budget.
struct Tracker {
  const Ucrg& g;
  const BaselineConfig& cfg;
  SolverResult r;

  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Tracker(const Ucrg& graph, const BaselineConfig& c) : g(graph), cfg(c) { r.qod = -1.0; }

  double score(std::vector<std::size_t> team) {
    std::sort(team.begin(), team.end());
    const double q = qod(team, g.weight);
    ++r.evaluations;
    offer(std::move(team), q);
    return q;
  }

  void offer(std::vector<std::size_t> sorted_team, double q) {
    if (q > r.qod) {
      r.qod = q;
      r.team = std::move(sorted_team);
      r.progress.emplace_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(), q);
    }
  }

  bool exhausted(std::size_t round) const {
    return cfg.max_evaluations > 0 ? r.evaluations >= cfg.max_evaluations : round >= cfg.iterations;
  }

  SolverResult finish() {
    r.qod = qod(r.team, g.weight);
    return std::move(r);
  }
};

/// Replaces repeated indices with the unused candidate of highest marginal QoD.
void repair(std::vector<std::size_t>& team, const Ucrg& g) {
  const std::size_t n = g.size();
  std::vector<char> used(n, 0);
  std::vector<std::size_t> keep, holes;
  for (std::size_t p = 0; p < team.size(); ++p) {
    if (used[team[p]]) {
      holes.push_back(p);
    } else {
      used[team[p]] = 1;
      keep.push_back(team[p]);
    }
  }
  for (auto p : holes) {
    std::size_t best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      double gain = 0.0;
      for (auto m : keep) gain += g.weight(c, m);
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    team[p] = best;
    used[best] = 1;
    keep.push_back(best);
  }
}

/// Indices of the k largest keys; ties go to the lower index.
std::vector<std::size_t> top_k(const std::vector<double>& key, std::size_t k) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return key[a] > key[b] || (key[a] == key[b] && a < b); });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

SolverResult ranked(const Ucrg& g, const std::vector<double>& key) {
  detail::require_feasible(g, "greedy recruit");
  SolverResult r;
  r.team = top_k(key, g.task.team_size);
  r.qod = qod(r.team, g.weight);
  r.evaluations = 1;
  r.iterations = 1;
  r.initial_qod = r.qod;
  r.trace.push_back(r.qod);
  return r;
}

/// Best-improvement single-swap descent.
void local_descent(detail::TeamState& s, Tracker& t) {
  while (true) {
    double best_total = s.total();
    std::size_t best_out = 0, best_in = 0;
    bool improved = false;
    for (auto out : s.sorted()) {
      for (std::size_t in = 0; in < s.n(); ++in) {
        if (s.contains(in)) continue;
        const double tot = s.total_after_swap(out, in);
        ++t.r.evaluations;
        if (tot > best_total + 1e-12) {
          best_total = tot;
          best_out = out;
          best_in = in;
          improved = true;
        }
      }
    }
    if (!improved) return;
    s.apply_swap(best_out, best_in);
    if (t.cfg.max_evaluations > 0 && t.r.evaluations >= t.cfg.max_evaluations) return;
  }
}

}  // namespace

SolverResult de_recruit(const Ucrg& g, const BaselineConfig& cfg) {
  cfg.validate();
  detail::require_feasible(g, "de_recruit");
  const std::size_t n = g.size(), k = g.task.team_size, np = cfg.population;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, np - 1), dim(0, k - 1);
  Tracker t(g, cfg);

  std::vector<std::vector<std::size_t>> pop(np);
  std::vector<double> fit(np);
  for (std::size_t i = 0; i < np; ++i) {
    pop[i] = detail::random_team(n, k, rng);
    fit[i] = t.score(pop[i]);
  }
  t.r.initial_qod = fit[0];

  const auto ln = static_cast<long long>(n);
  for (std::size_t gen = 0; !t.exhausted(gen); ++gen) {
    for (std::size_t i = 0; i < np && !(cfg.max_evaluations > 0 && t.exhausted(0)); ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      const std::size_t jrand = dim(rng);
      std::vector<std::size_t> trial = pop[i];
      for (std::size_t d = 0; d < k; ++d) {
        if (d != jrand && u(rng) >= cfg.de_cr) continue;
        const double diff = static_cast<double>(pop[b][d]) - static_cast<double>(pop[c][d]);
        long long v = static_cast<long long>(pop[a][d]) + std::llround(cfg.de_f * diff);
        v = ((v % ln) + ln) % ln;
        trial[d] = static_cast<std::size_t>(v);
      }
      repair(trial, g);
      std::sort(trial.begin(), trial.end());
      const double q = t.score(trial);
      if (q >= fit[i]) {
        pop[i] = std::move(trial);
        fit[i] = q;
      }
    }
    t.r.trace.push_back(t.r.qod);
    t.r.iterations = gen + 1;
  }
  return t.finish();
}

SolverResult pso_recruit(const Ucrg& g, const BaselineConfig& cfg) {
  cfg.validate();
  detail::require_feasible(g, "pso_recruit");
  const std::size_t n = g.size(), k = g.task.team_size, np = cfg.population;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> v0(-0.1, 0.1);
  auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  Tracker t(g, cfg);

  std::vector<std::vector<double>> x(np, std::vector<double>(n)), v = x, pbest;
  std::vector<double> pbest_q(np);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t d = 0; d < n; ++d) {
      x[p][d] = u();
      v[p][d] = v0(rng);
    }
    pbest_q[p] = t.score(top_k(x[p], k));
  }
  pbest = x;
  t.r.initial_qod = pbest_q[0];
  std::size_t gbest = static_cast<std::size_t>(std::max_element(pbest_q.begin(), pbest_q.end()) - pbest_q.begin());

  for (std::size_t it = 0; !t.exhausted(it); ++it) {
    for (std::size_t p = 0; p < np && !(cfg.max_evaluations > 0 && t.exhausted(0)); ++p) {
      for (std::size_t d = 0; d < n; ++d) {
        double vel = cfg.pso_w * v[p][d] + cfg.pso_c1 * u() * (pbest[p][d] - x[p][d]) +
                     cfg.pso_c2 * u() * (pbest[gbest][d] - x[p][d]);
        vel = std::clamp(vel, -cfg.pso_vmax, cfg.pso_vmax);
        v[p][d] = vel;
        x[p][d] += vel;
      }
      const double q = t.score(top_k(x[p], k));
      if (q > pbest_q[p]) {
        pbest_q[p] = q;
        pbest[p] = x[p];
        if (q > pbest_q[gbest]) gbest = p;
      }
    }
    t.r.trace.push_back(t.r.qod);
    t.r.iterations = it + 1;
  }
  return t.finish();
}

SolverResult sa_recruit(const Ucrg& g, const BaselineConfig& cfg) {
  cfg.validate();
  detail::require_feasible(g, "sa_recruit");
  const std::size_t n = g.size(), k = g.task.team_size;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_member(0, k - 1), pick_any(0, n - 1);
  Tracker t(g, cfg);

  detail::TeamState s(g.weight, detail::random_team(n, k, rng));
  t.r.initial_qod = t.score(s.members());
  double temp = cfg.sa_t0 > 0.0 ? cfg.sa_t0 : std::max(s.qod(), 1e-12);
  for (std::size_t level = 0; !t.exhausted(level); ++level) {
    for (std::size_t m = 0; m < cfg.sa_moves_per_temp && k < n; ++m) {
      const std::size_t out = s.members()[pick_member(rng)];
      std::size_t in;
      do in = pick_any(rng); while (s.contains(in));
      const double delta = s.qod_of(s.total_after_swap(out, in)) - s.qod();
      ++t.r.evaluations;
      if (delta >= 0.0 || u(rng) < std::exp(delta / temp)) {
        s.apply_swap(out, in);
        t.offer(s.sorted(), s.qod());
      }
      if (cfg.max_evaluations > 0 && t.exhausted(0)) break;
    }
    temp *= cfg.sa_cooling;
    t.r.trace.push_back(t.r.qod);
    t.r.iterations = level + 1;
    if (k == n) break;
  }
  return t.finish();
}

SolverResult vns_recruit(const Ucrg& g, const BaselineConfig& cfg) {
  cfg.validate();
  detail::require_feasible(g, "vns_recruit");
  const std::size_t n = g.size(), k = g.task.team_size;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick_member(0, k - 1), pick_any(0, n - 1);
  Tracker t(g, cfg);

  detail::TeamState cur(g.weight, detail::random_team(n, k, rng));
  t.r.initial_qod = t.score(cur.members());
  local_descent(cur, t);
  t.offer(cur.sorted(), cur.qod());
  std::size_t m = 1;
  const std::size_t max_m = std::min(cfg.vns_max_m, std::min(k, n - k));
  for (std::size_t it = 0; !t.exhausted(it) && k < n; ++it) {
    detail::TeamState trial = cur;
    for (std::size_t step = 0; step < m; ++step) {
      const std::size_t out = trial.members()[pick_member(rng)];
      std::size_t in;
      do in = pick_any(rng); while (trial.contains(in));
      trial.apply_swap(out, in);
    }
    local_descent(trial, t);
    if (trial.qod() > cur.qod() + 1e-12) {
      cur = std::move(trial);
      cur.reset(cur.members());
      t.offer(cur.sorted(), cur.qod());
      m = 1;
    } else {
      m = m >= max_m ? 1 : m + 1;
    }
    t.r.trace.push_back(t.r.qod);
    t.r.iterations = it + 1;
  }
  return t.finish();
}

SolverResult gmpl_recruit(const Ucrg& g) {
  if (g.value.size() != g.size()) throw std::invalid_argument("gmpl_recruit: UCRG has no trust values");
  const std::size_t n = g.size();
  std::vector<double> key(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) key[i] += g.value(i, j) + g.value(j, i);
    if (n > 1) key[i] /= 2.0 * static_cast<double>(n - 1);
  }
  return ranked(g, key);
}

SolverResult gmdb_recruit(const Ucrg& g) {
  std::vector<double> key;
  for (const auto& m : g.members) key.push_back(-m.distance_km);
  return ranked(g, key);
}

SolverResult gmab_recruit(const Ucrg& g) {
  std::vector<double> key;
  for (const auto& m : g.members) key.push_back(m.ability);
  return ranked(g, key);
}

SolverResult random_recruit(const Ucrg& g, std::uint64_t seed) {
  detail::require_feasible(g, "random_recruit");
  std::mt19937_64 rng(seed);
  SolverResult r;
  r.team = detail::random_team(g.size(), g.task.team_size, rng);
  r.qod = qod(r.team, g.weight);
  r.evaluations = 1;
  r.iterations = 1;
  r.initial_qod = r.qod;
  r.trace.push_back(r.qod);
  return r;
}

SolverResult solve(Algorithm a, const Ucrg& g, const BaselineConfig& base, const TabuConfig& tabu) {
  switch (a) {
    case Algorithm::TSR: return tsr_recruit(g, tabu);
    case Algorithm::DE: return de_recruit(g, base);
    case Algorithm::PSO: return pso_recruit(g, base);
    case Algorithm::VNS: return vns_recruit(g, base);
    case Algorithm::SA: return sa_recruit(g, base);
    case Algorithm::GMPL: return gmpl_recruit(g);
    case Algorithm::GMDB: return gmdb_recruit(g);
    case Algorithm::GMAB: return gmab_recruit(g);
    case Algorithm::Random: return random_recruit(g, base.seed);
  }
  throw std::invalid_argument("solve: unknown algorithm");
}

}  // namespace cmcs
