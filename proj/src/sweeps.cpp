#include "cmcs/sweeps.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "cmcs/metrics.hpp"

namespace cmcs {

namespace {

constexpr std::pair<SweepKind, const char*> kSweepNames[] = {
    {SweepKind::Tasks6Regions, "tasks_6regions"},
    {SweepKind::Workers200To1200, "workers_200_1200"},
    {SweepKind::TasksSequential, "tasks_sequential"},
    {SweepKind::Kappa10To70, "kappa_10_70"},
    {SweepKind::Convergence, "convergence"},
};

Instance subset(const RegionBlock& b, const Task& task, std::span<const std::size_t> keep) {
  Instance inst;
  inst.task = task;
  for (auto w : keep) inst.workers.push_back(b.workers[w]);
  inst.value = b.value.restrict(keep);
  inst.auc = b.auc.restrict(keep);
  return inst;
}

std::vector<std::size_t> iota_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

struct Solved {
  SweepRow row;
  SolverResult result;
  std::vector<std::size_t> workers;  // indices into the instance's worker list
};

Solved solve_one(const Ucrg* g, const Task& task, Algorithm a, std::uint64_t seed, const SweepConfig& cfg) {
  Solved s;
  auto& row = s.row;
  row.algo = algorithm_name(a);
  row.task = task.id;
  row.seed = seed;
  row.z_km = task.z_km;
  if (!g) return s;

  TabuConfig tabu = cfg.tabu;
  tabu.seed = seed;
  BaselineConfig base = cfg.base;
  base.seed = seed;
  if (cfg.match_budget) base.max_evaluations = tsr_budget(tabu, g->size(), task.team_size);

  row.millis = time_ms([&] { s.result = solve(a, *g, base, tabu); });
  row.feasible = true;
  row.qod = s.result.qod;
  row.pl = privacy_loss(s.result.team, g->trust, g->auc);
  const auto collab = select_collaboration_team(s.result.team, task, g->trust, g->auc);
  row.collab_size = collab.team.size();
  row.collab_pl = collab.pl;
  row.collab_feasible = collab.feasible;
  for (auto m : s.result.team) {
    const auto& member = g->members[m];
    row.max_distance_km = std::max(row.max_distance_km, member.distance_km);
    if (!row.members.empty()) row.members += ';';
    row.members += member.id;
    s.workers.push_back(member.worker);
  }
  return s;
}

std::optional<Ucrg> try_ucrg(const Instance& inst) {
  try {
    return inst.ucrg();
  } catch (const InfeasibleTask&) {
    return std::nullopt;
  }
}

/// Runs jobs on up to `threads` concurrent workers; results keep job order.
template <typename T>
std::vector<T> run_jobs(std::vector<std::function<T()>>& jobs, std::size_t threads) {
  std::vector<T> out;
  out.reserve(jobs.size());
  if (threads <= 1) {
    for (auto& j : jobs) out.push_back(j());
    return out;
  }
  for (std::size_t start = 0; start < jobs.size(); start += threads) {
    std::vector<std::future<T>> running;
    for (std::size_t i = start; i < std::min(jobs.size(), start + threads); ++i)
      running.push_back(std::async(std::launch::async, jobs[i]));
    for (auto& f : running) out.push_back(f.get());
  }
  return out;
}

const RegionBlock& first_block(const Scenario& s) {
  if (s.blocks.empty() || s.blocks.front().tasks.empty()) throw std::invalid_argument("sweep: scenario has no tasks");
  return s.blocks.front();
}

}  // namespace

std::string sweep_name(SweepKind k) {
  for (const auto& [kind, name] : kSweepNames)
    if (kind == k) return name;
  return "?";
}

SweepKind parse_sweep(std::string_view name) {
  for (const auto& [kind, n] : kSweepNames)
    if (name == n) return kind;
  throw std::invalid_argument("unknown sweep: " + std::string(name));
}

std::size_t tsr_budget(const TabuConfig& cfg, std::size_t n, std::size_t k) {
  const std::size_t per_iter = n <= cfg.full_neighborhood_max ? k * (n - k) : cfg.neighborhood_sample;
  return 1 + cfg.iterations * std::max<std::size_t>(per_iter, 1);
}

std::vector<SweepRow> run_sweep(SweepKind kind, const Scenario& s, std::span<const Algorithm> algos,
                                std::span<const std::uint64_t> seeds, const SweepConfig& cfg) {
  const std::string name = sweep_name(kind);
  std::vector<SweepRow> rows;

  // Settings that are independent instances: one job per setting.
  struct Setting {
    std::string label;
    std::size_t region;
    Instance inst;
  };
  std::vector<Setting> settings;

  switch (kind) {
    case SweepKind::Tasks6Regions:
      for (std::size_t r = 0; r < s.blocks.size(); ++r)
        for (const auto& t : s.blocks[r].tasks)
          settings.push_back({t.id, r, subset(s.blocks[r], t, iota_n(s.blocks[r].workers.size()))});
      break;
    case SweepKind::Workers200To1200: {
      const auto& b = first_block(s);
      for (std::size_t n = 200; n <= std::min<std::size_t>(1200, b.workers.size()); n += 200)
        settings.push_back({"workers=" + std::to_string(n), 0, subset(b, b.tasks.front(), iota_n(n))});
      if (settings.empty()) throw std::invalid_argument("workers sweep needs at least 200 workers in a region");
      break;
    }
    case SweepKind::Kappa10To70:
      for (int kappa = 10; kappa <= 70; kappa += 10)
        for (std::size_t r = 0; r < s.blocks.size(); ++r)
          for (const auto& t : s.blocks[r].tasks) {
            Task task = t;
            task.kappa = kappa;
            settings.push_back({"kappa=" + std::to_string(kappa), r,
                                subset(s.blocks[r], task, iota_n(s.blocks[r].workers.size()))});
          }
      break;
    case SweepKind::TasksSequential: {
      // Recruited workers leave the pool, so each (algorithm, seed) runs the
      // task list in order.
      const auto& b = first_block(s);
      std::vector<std::function<std::vector<SweepRow>()>> jobs;
      for (auto a : algos)
        for (auto seed : seeds)
          jobs.push_back([&, a, seed] {
            std::vector<SweepRow> out;
            std::vector<std::size_t> pool = iota_n(b.workers.size());
            for (const auto& t : b.tasks) {
              const auto inst = subset(b, t, pool);
              const auto g = try_ucrg(inst);
              auto solved = solve_one(g ? &*g : nullptr, t, a, seed, cfg);
              solved.row.setting = t.id;
              std::vector<std::size_t> next;
              for (std::size_t i = 0; i < pool.size(); ++i)
                if (std::find(solved.workers.begin(), solved.workers.end(), i) == solved.workers.end())
                  next.push_back(pool[i]);
              pool = std::move(next);
              out.push_back(std::move(solved.row));
            }
            return out;
          });
      const auto chunks = run_jobs(jobs, cfg.threads);
      // Reorder to setting-major.
      for (std::size_t t = 0; t < b.tasks.size(); ++t)
        for (const auto& chunk : chunks) rows.push_back(chunk[t]);
      for (auto& r : rows) r.sweep = name;
      return rows;
    }
    case SweepKind::Convergence: {
      const auto& b = first_block(s);
      const auto inst = subset(b, b.tasks.front(), iota_n(b.workers.size()));
      const auto g = try_ucrg(inst);
      const std::size_t length = std::max<std::size_t>(cfg.tabu.iterations, 1);
      std::vector<std::function<std::vector<SweepRow>()>> jobs;
      for (auto a : algos)
        for (auto seed : seeds)
          jobs.push_back([&, a, seed] {
            const auto solved = solve_one(g ? &*g : nullptr, inst.task, a, seed, cfg);
            std::vector<SweepRow> out;
            const auto& trace = solved.result.trace;
            for (std::size_t i = 1; i <= length; ++i) {
              SweepRow row = solved.row;
              row.setting = "iter=" + std::to_string(i);
              if (!trace.empty()) row.qod = trace[std::min(i, trace.size()) - 1];
              out.push_back(std::move(row));
            }
            return out;
          });
      const auto chunks = run_jobs(jobs, cfg.threads);
      for (std::size_t i = 0; i < length; ++i)
        for (const auto& chunk : chunks) rows.push_back(chunk[i]);
      for (auto& r : rows) r.sweep = name;
      return rows;
    }
  }

  std::vector<std::function<std::vector<SweepRow>()>> jobs;
  for (const auto& st : settings) {
    jobs.push_back([&] {
      const auto g = try_ucrg(st.inst);
      std::vector<SweepRow> out;
      for (auto a : algos)
        for (auto seed : seeds) {
          auto solved = solve_one(g ? &*g : nullptr, st.inst.task, a, seed, cfg);
          solved.row.setting = st.label;
          solved.row.region = st.region;
          out.push_back(std::move(solved.row));
        }
      return out;
    });
  }
  for (auto& chunk : run_jobs(jobs, cfg.threads))
    for (auto& r : chunk) rows.push_back(std::move(r));
  for (auto& r : rows) r.sweep = name;
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out.precision(12);
  out << "sweep,algo,setting,region,task,seed,feasible,qod,pl,collab_size,collab_pl,collab_feasible,"
         "max_distance_km,z_km,millis,members\n";
  for (const auto& r : rows) {
    out << r.sweep << ',' << r.algo << ',' << r.setting << ',' << r.region << ',' << r.task << ',' << r.seed
        << ',' << (r.feasible ? "true" : "false") << ',' << r.qod << ',' << r.pl << ',' << r.collab_size << ','
        << r.collab_pl << ',' << (r.collab_feasible ? "true" : "false") << ',' << r.max_distance_km << ','
        << r.z_km << ',' << r.millis << ',' << r.members << '\n';
  }
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sweep_csv(rows, out);
}

}  // namespace cmcs
