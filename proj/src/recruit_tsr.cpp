#include "cmcs/recruit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_set>
#include <stdexcept>

#include "cmcs/embed_init.hpp"
#include "team_state.hpp"

namespace cmcs {

void TabuConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("TabuConfig: iterations must be >= 1");
  if (tenure < 1) throw std::invalid_argument("TabuConfig: tenure must be >= 1");
  if (neighborhood_sample < 1) throw std::invalid_argument("TabuConfig: neighborhood_sample must be >= 1");
}

namespace {

/// FIFO-bounded set of visited team keys.
class TabuList {
 public:
  explicit TabuList(std::size_t tenure) : tenure_(tenure) {}

  bool contains(std::uint64_t key) const { return keys_.count(key) != 0; }

  void push(std::uint64_t key) {
    if (!keys_.insert(key).second) return;
    fifo_.push_back(key);
    if (fifo_.size() > tenure_) {
      keys_.erase(fifo_.front());
      fifo_.pop_front();
    }
  }

 private:
  std::size_t tenure_;
  std::deque<std::uint64_t> fifo_;
  std::unordered_set<std::uint64_t> keys_;
};

/// Uniform index in [0, range) from one raw draw (multiply-shift).
inline std::size_t bounded(std::uint64_t x, std::size_t range) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(x) * range) >> 64);
}

struct Move {
  double total;
  std::size_t out, in;
};

}  // namespace

SolverResult tsr_recruit(const Ucrg& g, const TabuConfig& cfg) {
  cfg.validate();
  detail::require_feasible(g, "tsr_recruit");
  const std::size_t n = g.size();
  const std::size_t k = g.task.team_size;

  std::mt19937_64 rng(cfg.seed);
  detail::TeamState state(g.weight, detail::random_team(n, k, rng));
  SolverResult r;
  r.initial_qod = state.qod();
  r.team = state.sorted();
  r.qod = state.qod();
  r.evaluations = 1;

  // A team's key is the XOR of per-member random words, so it depends only
  // on the member set and a swap updates it in O(1).
  std::vector<std::uint64_t> zobrist(n);
  for (std::size_t c = 0; c < n; ++c) zobrist[c] = mix_seed(0x7a6f6272697374ULL, c);
  std::uint64_t key = 0;
  for (auto m : state.members()) key ^= zobrist[m];
  TabuList tabu(cfg.tenure);
  tabu.push(key);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  r.progress.emplace_back(0.0, r.qod);

  const bool full = n <= cfg.full_neighborhood_max;
  std::vector<std::size_t> outside;
  for (std::size_t it = 0; it < cfg.iterations && k < n; ++it) {
    outside.clear();
    for (std::size_t c = 0; c < n; ++c)
      if (!state.contains(c)) outside.push_back(c);

    // Highest-QoD neighbor, first in enumeration order on ties. Outside strict
    // mode tabu neighbors are skipped; the tabu lookup only runs for moves
    // that would beat the current pick.
    Move pick{-std::numeric_limits<double>::infinity(), 0, 0};
    bool have = false;
    auto consider = [&](std::size_t out, std::size_t in) {
      const double t = state.total_after_swap(out, in);
      if (have && t <= pick.total) return;
      if (cfg.strict_improvement) {
        pick = {t, out, in};
        have = true;
        return;
      }
      if (tabu.contains(key ^ zobrist[out] ^ zobrist[in])) return;
      pick = {t, out, in};
      have = true;
    };
    std::size_t evaluated = 0;
    if (full) {
      for (auto out : state.sorted())
        for (auto in : outside) consider(out, in);
      evaluated = k * outside.size();
    } else {
      const auto& members = state.members();
      for (std::size_t s = 0; s < cfg.neighborhood_sample; ++s) {
        consider(members[bounded(rng(), k)], outside[bounded(rng(), outside.size())]);
      }
      evaluated = cfg.neighborhood_sample;
    }
    r.evaluations += evaluated;

    const Move* chosen = have ? &pick : nullptr;
    if (chosen && cfg.strict_improvement &&
        (state.qod_of(pick.total) <= state.qod() || tabu.contains(key ^ zobrist[pick.out] ^ zobrist[pick.in]))) {
      chosen = nullptr;
    }

    if (chosen) {
      key ^= zobrist[chosen->out] ^ zobrist[chosen->in];
      state.apply_swap(chosen->out, chosen->in);
      tabu.push(key);
    }
    if (state.qod() > r.qod) {
      r.qod = state.qod();
      r.team = state.sorted();
      r.progress.emplace_back(elapsed_ms(), r.qod);
    }
    r.trace.push_back(r.qod);
    r.iterations = it + 1;
    // With the full neighborhood a stalled iteration repeats identically.
    if (full && !chosen) break;
    // Periodically rebuild the sums so rounding cannot accumulate.
    if (chosen && r.iterations % 64 == 0) state.reset(state.members());
  }

  const double check = qod(r.team, g.weight);
  if (std::abs(check - r.qod) > 1e-9) {
    throw std::logic_error("tsr_recruit: incremental QoD drifted from the recomputed value");
  }
  r.qod = check;
  return r;
}

SolverResult brute_force_recruit(const Ucrg& g, std::size_t team_size) {
  const std::size_t n = g.size();
  if (team_size < 2 || team_size > n) throw InfeasibleTask("brute_force_recruit: team size out of range");
  double combos = 1.0;
  for (std::size_t i = 0; i < team_size; ++i) combos = combos * double(n - i) / double(i + 1);
  if (combos > 1e6 + 0.5) throw std::invalid_argument("brute_force_recruit: instance too large");

  std::vector<std::size_t> team(team_size);
  for (std::size_t i = 0; i < team_size; ++i) team[i] = i;
  SolverResult r;
  r.qod = -std::numeric_limits<double>::infinity();
  while (true) {
    const double q = qod(team, g.weight);
    ++r.evaluations;
    if (q > r.qod) {
      r.qod = q;
      r.team = team;
    }
    // Next combination in lexicographic order.
    std::size_t i = team_size;
    while (i > 0 && team[i - 1] == n - team_size + i - 1) --i;
    if (i == 0) break;
    ++team[i - 1];
    for (std::size_t j = i; j < team_size; ++j) team[j] = team[j - 1] + 1;
  }
  r.iterations = r.evaluations;
  r.trace.push_back(r.qod);
  return r;
}

CollaborationTeam select_collaboration_team(std::span<const std::size_t> team, const Task& task,
                                            const PairMatrix& trust, const PairMatrix& auc) {
  if (team.size() < 2) throw std::invalid_argument("select_collaboration_team: team needs at least two members");
  CollaborationTeam c;
  std::vector<std::size_t> cur(team.begin(), team.end());
  std::sort(cur.begin(), cur.end());
  c.pl = privacy_loss(cur, trust, auc);
  c.pl_trajectory.push_back(c.pl);
  while (c.pl > task.zeta && cur.size() > 2) {
    std::size_t drop = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cur.size(); ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < cur.size(); ++b)
        if (a != b) s += trust(cur[a], cur[b]);
      s /= static_cast<double>(cur.size() - 1);
      if (s < lowest) {
        lowest = s;
        drop = a;
      }
    }
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(drop));
    c.pl = privacy_loss(cur, trust, auc);
    c.pl_trajectory.push_back(c.pl);
  }
  c.feasible = c.pl <= task.zeta;
  if (c.feasible) c.team = std::move(cur);
  return c;
}

ConflictResolution resolve_conflicts(std::span<const Ucrg> ucrgs, std::vector<std::vector<std::size_t>> teams,
                                     const TabuConfig& cfg) {
  if (teams.size() != ucrgs.size()) throw std::invalid_argument("resolve_conflicts: one team per task expected");
  ConflictResolution res;
  res.filled.assign(teams.size(), true);
  for (std::size_t t = 0; t < teams.size(); ++t) {
    std::sort(teams[t].begin(), teams[t].end());
    if (teams[t].empty()) res.filled[t] = false;
  }

  while (true) {
    std::map<std::size_t, std::vector<std::size_t>> holders;  // worker -> tasks
    for (std::size_t t = 0; t < teams.size(); ++t)
      for (auto w : teams[t]) holders[w].push_back(t);
    auto it = std::find_if(holders.begin(), holders.end(), [](const auto& kv) { return kv.second.size() > 1; });
    if (it == holders.end()) break;
    ++res.rounds;
    const std::size_t worker = it->first;
    const auto tasks = it->second;

    std::size_t winner = tasks.front();
    double best = -std::numeric_limits<double>::infinity();
    for (auto t : tasks) {
      const auto& g = ucrgs[t];
      const auto wi = *g.local_index(worker);
      double sum = 0.0;
      for (auto mate : teams[t])
        if (mate != worker) sum += g.weight(wi, *g.local_index(mate));
      if (sum > best) {
        best = sum;
        winner = t;
      }
    }

    for (auto t : tasks) {
      if (t == winner) continue;
      std::set<std::size_t> taken;
      for (std::size_t o = 0; o < teams.size(); ++o)
        if (o != t) taken.insert(teams[o].begin(), teams[o].end());
      const auto& g = ucrgs[t];
      std::vector<std::size_t> keep;
      for (std::size_t m = 0; m < g.size(); ++m)
        if (!taken.count(g.members[m].worker)) keep.push_back(m);
      teams[t].clear();
      if (keep.size() < g.task.team_size) {
        res.filled[t] = false;
        continue;
      }
      TabuConfig rerun = cfg;
      rerun.seed = mix_seed(mix_seed(cfg.seed, t), res.rounds);
      const auto sub = g.restrict(keep);
      for (auto m : tsr_recruit(sub, rerun).team) teams[t].push_back(sub.members[m].worker);
      std::sort(teams[t].begin(), teams[t].end());
    }
  }
  res.teams = std::move(teams);
  return res;
}

std::vector<RecruitmentOutcome> recruit_tasks(std::span<const Task> tasks, std::span<const Worker> workers,
                                              const PairMatrix& worker_value, const PairMatrix& worker_auc,
                                              const TabuConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  std::vector<RecruitmentOutcome> out(tasks.size());
  std::vector<Ucrg> ucrgs(tasks.size());
  std::vector<std::vector<std::size_t>> teams(tasks.size());

  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    out[t].task_id = tasks[t].id;
    jobs.push_back(std::async(std::launch::async, [&, t] {
      tasks[t].validate();
      ucrgs[t] = Ucrg{};
      try {
        const auto g = build_task_ucrg(tasks[t], workers, worker_value, worker_auc);
        TabuConfig c = cfg;
        c.seed = mix_seed(cfg.seed, t);
        const auto start = Clock::now();
        const auto r = tsr_recruit(g, c);
        out[t].millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        out[t].iterations_used = r.iterations;
        out[t].best_qod_trace = r.trace;
        for (auto m : r.team) teams[t].push_back(g.members[m].worker);
        ucrgs[t] = g;
      } catch (const InfeasibleTask&) {
        // Left unfilled.
      }
    }));
  }
  for (auto& j : jobs) j.get();

  // Unfilled tasks keep an empty UCRG; give them the task so ids line up.
  for (std::size_t t = 0; t < tasks.size(); ++t) ucrgs[t].task = tasks[t];
  const auto resolved = resolve_conflicts(ucrgs, std::move(teams), cfg);

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& o = out[t];
    o.filled = resolved.filled[t];
    if (!o.filled) continue;
    const auto& g = ucrgs[t];
    std::vector<std::size_t> local;
    for (auto w : resolved.teams[t]) local.push_back(*g.local_index(w));
    o.execution_team = resolved.teams[t];
    o.qod = qod(local, g.weight);
    const auto collab = select_collaboration_team(local, tasks[t], g.trust, g.auc);
    o.pl = collab.pl;
    o.feasible = collab.feasible;
    for (auto m : collab.team) o.collaboration_team.push_back(g.members[m].worker);
  }
  return out;
}

}  // namespace cmcs
