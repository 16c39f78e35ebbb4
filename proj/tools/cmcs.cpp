// cmcs: command-line front end for trust evaluation, partitioning and recruitment.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cmcs/baselines.hpp"
#include "cmcs/embed_init.hpp"
#include "cmcs/graph_store.hpp"
#include "cmcs/metrics.hpp"
#include "cmcs/recruit.hpp"
#include "cmcs/region_partition.hpp"
#include "cmcs/scenario.hpp"
#include "cmcs/sweeps.hpp"
#include "cmcs/tref.hpp"

using json = nlohmann::json;
using namespace cmcs;

namespace {

// ---------------------------------------------------------------------------
// Config file: one JSON object with optional sections
//   "walk", "skipgram", "train", "kmeans", "tabu", "baseline", "scenario", "instance"
// whose keys are the field names of the matching library structs.

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

const json& section(const json& cfg, const char* name) {
  static const json empty = json::object();
  return cfg.contains(name) ? cfg.at(name) : empty;
}

void apply(const json& j, WalkConfig& c) {
  take(j, "p", c.p);
  take(j, "q", c.q);
  take(j, "walk_len", c.walk_len);
  take(j, "walks_per_node", c.walks_per_node);
}

void apply(const json& j, SkipGramConfig& c) {
  take(j, "dim", c.dim);
  take(j, "window", c.window);
  take(j, "negatives", c.negatives);
  take(j, "epochs", c.epochs);
  take(j, "lr", c.lr);
}

void apply(const json& j, TrainConfig& c) {
  take(j, "lr", c.lr);
  take(j, "dropout", c.dropout);
  take(j, "l2", c.l2);
  take(j, "epochs", c.epochs);
  take(j, "layer_dims", c.layer_dims);
  take(j, "edge_dim", c.edge_dim);
  take(j, "batch_size", c.batch_size);
  take(j, "patience", c.patience);
  take(j, "validation_fraction", c.validation_fraction);
  take(j, "shared_expert_weights", c.shared_expert_weights);
  take(j, "beta1", c.beta1);
  take(j, "beta2", c.beta2);
  take(j, "adam_eps", c.adam_eps);
  if (j.contains("expert_pr")) c.expert_pr = j.at("expert_pr").get<double>();
}

void apply(const json& j, KMeansConfig& c) {
  take(j, "k", c.k);
  take(j, "batch", c.batch);
  take(j, "max_iter", c.max_iter);
  take(j, "tolerance_deg", c.tolerance_deg);
  take(j, "literal_batch_mean", c.literal_batch_mean);
}

void apply(const json& j, TabuConfig& c) {
  take(j, "iterations", c.iterations);
  take(j, "tenure", c.tenure);
  take(j, "neighborhood_sample", c.neighborhood_sample);
  take(j, "full_neighborhood_max", c.full_neighborhood_max);
  take(j, "strict_improvement", c.strict_improvement);
}

void apply(const json& j, BaselineConfig& c) {
  take(j, "population", c.population);
  take(j, "iterations", c.iterations);
  take(j, "max_evaluations", c.max_evaluations);
  take(j, "de_f", c.de_f);
  take(j, "de_cr", c.de_cr);
  take(j, "pso_w", c.pso_w);
  take(j, "pso_c1", c.pso_c1);
  take(j, "pso_c2", c.pso_c2);
  take(j, "pso_vmax", c.pso_vmax);
  take(j, "sa_t0", c.sa_t0);
  take(j, "sa_cooling", c.sa_cooling);
  take(j, "sa_moves_per_temp", c.sa_moves_per_temp);
  take(j, "vns_max_m", c.vns_max_m);
}

void apply(const json& j, ScenarioParams& c) {
  take(j, "regions", c.regions);
  take(j, "workers_per_region", c.workers_per_region);
  take(j, "tasks_per_region", c.tasks_per_region);
  take(j, "team_size", c.team_size);
  take(j, "alpha", c.alpha);
  take(j, "beta", c.beta);
  take(j, "kappa", c.kappa);
  take(j, "z_km", c.z_km);
  take(j, "zeta", c.zeta);
}

void apply(const json& j, InstanceParams& c) {
  take(j, "candidates", c.candidates);
  take(j, "team_size", c.team_size);
  take(j, "radius_km", c.radius_km);
  take(j, "kappa", c.kappa);
  take(j, "z_km", c.z_km);
  take(j, "zeta", c.zeta);
  take(j, "max_len_km", c.max_len_km);
  take(j, "max_num", c.max_num);
  take(j, "auc_lo", c.auc_lo);
  take(j, "auc_hi", c.auc_hi);
  take(j, "reputation_trust", c.reputation_trust);
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  return out;
}

std::string join_ids(std::span<const std::size_t> idx, std::span<const Worker> workers) {
  std::string s;
  for (auto i : idx) {
    if (!s.empty()) s += ';';
    s += workers[i].id;
  }
  return s;
}

// Options every subcommand shares.
struct Common {
  std::uint64_t seed{1};
  std::string out;
  std::string config;

  json load() const { return config.empty() ? json::object() : read_json(config); }
};

void add_common(CLI::App* app, Common& c, bool out_required = true) {
  app->add_option("--seed", c.seed, "Random seed");
  auto* o = app->add_option("--out", c.out, "Output path");
  if (out_required) o->required();
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
}

// ---------------------------------------------------------------------------

int cmd_graph(const std::string& action, const std::string& path, const Common& c) {
  if (action != "stats") throw std::invalid_argument("unknown graph action: " + action);
  const auto loaded = load_trust_graph(path);
  const auto st = graph_stats(loaded.graph);
  std::printf("%-12s %10s %10s %12s %14s\n", "Dataset", "Nodes", "Edges", "Density", "Avg. degree");
  std::printf("%-12s %10zu %10zu %12.6g %14.4f\n", std::filesystem::path(path).stem().string().c_str(),
              st.nodes, st.edges, st.density, st.average_degree);
  std::fprintf(stderr, "lines=%zu self_loops_dropped=%zu duplicates_replaced=%zu\n", loaded.report.lines,
               loaded.report.self_loops_dropped, loaded.report.duplicates_replaced);
  if (!c.out.empty()) {
    auto out = open_out(c.out);
    out << "dataset,nodes,edges,density,average_degree\n"
        << std::filesystem::path(path).stem().string() << ',' << st.nodes << ',' << st.edges << ','
        << st.density << ',' << st.average_degree << '\n';
  }
  return 0;
}

int cmd_embed(const std::string& graph_path, std::size_t dim, const std::string& format, const Common& c) {
  const auto cfg = c.load();
  WalkConfig walk;
  SkipGramConfig sg;
  apply(section(cfg, "walk"), walk);
  apply(section(cfg, "skipgram"), sg);
  if (dim) sg.dim = dim;
  walk.seed = c.seed;
  sg.seed = c.seed;
  const auto g = load_trust_graph(graph_path).graph;
  const auto t = node2vec_embeddings(g, walk, sg);
  if (format == "csv")
    save_embeddings_csv(t, c.out);
  else
    save_embeddings(t, c.out);
  std::printf("embedded %zu nodes, dim %zu -> %s\n", t.size(), t.dim(), c.out.c_str());
  return 0;
}

int cmd_trust_train(const std::string& graph_path, const std::string& emb_path, double split_fraction,
                    const std::string& expert, const std::string& metrics_path, const Common& c) {
  if (expert != "on" && expert != "off") throw std::invalid_argument("--expert must be on or off");
  const auto cfg_json = c.load();
  TrainConfig cfg;
  apply(section(cfg_json, "train"), cfg);
  cfg.seed = c.seed;
  const auto g = load_trust_graph(graph_path).graph;
  const auto emb = align_embeddings(load_embeddings(emb_path), g);
  const auto split = split_edges(g, split_fraction, c.seed);
  const auto result = train(g, split, emb, cfg, expert == "on");
  const auto ev = make_evaluator(result, g, split.test);
  ev.save(c.out);

  std::printf("epochs=%zu best_epoch=%zu pr=%.4f experts=%zu diverged=%d\n", result.train_loss.size(),
              result.best_epoch, result.pr.pr, result.experts.size(), result.diverged ? 1 : 0);
  if (!split.test.empty()) {
    const auto rep = evaluate_edges(ev, split.test);
    std::printf("test edges=%zu weighted_f1=%.4f macro_f1=%.4f accuracy=%.4f mae=%.4f\n", rep.count,
                rep.weighted_f1, rep.macro_f1, rep.accuracy, rep.mae);
    if (!metrics_path.empty()) {
      auto out = open_out(metrics_path);
      out << "seed,expert,split,test_edges,weighted_f1,macro_f1,accuracy,mae\n"
          << c.seed << ',' << expert << ',' << split_fraction << ',' << rep.count << ',' << rep.weighted_f1
          << ',' << rep.macro_f1 << ',' << rep.accuracy << ',' << rep.mae << '\n';
    }
  }
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    out.push_back(tok);
  }
  return out;
}

int cmd_trust_eval(const std::string& model_path, const std::string& pairs_path, const Common& c) {
  const auto ev = TrustEvaluator::load(model_path);
  std::ifstream in(pairs_path);
  if (!in) throw std::runtime_error("cannot open " + pairs_path);
  auto out = open_out(c.out);
  out << "src,dst,level,value,p_observer,p_apprentice,p_journeyer,p_master\n";
  std::string line;
  std::size_t lineno = 0, written = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_csv_line(line);
    if (f.size() < 2 || f[0].empty()) continue;
    if (lineno == 1 && f[0] == "src") continue;  // header
    const auto a = ev.observed().find(f[0]);
    const auto b = ev.observed().find(f[1]);
    if (!a || !b) throw ParseError("unknown node in pair " + f[0] + "," + f[1], lineno);
    const auto p = ev.predict(*a, *b);
    out << f[0] << ',' << f[1] << ',' << level_name(p.level) << ',' << trust_value(p.level);
    for (double q : p.probs) out << ',' << q;
    out << '\n';
    ++written;
  }
  std::printf("scored %zu pairs -> %s\n", written, c.out.c_str());
  return 0;
}

int cmd_partition(const std::string& checkins_path, std::size_t k, std::size_t batch, const Common& c) {
  const auto cfg_json = c.load();
  KMeansConfig cfg;
  apply(section(cfg_json, "kmeans"), cfg);
  if (k) cfg.k = k;
  if (batch) cfg.batch = batch;
  cfg.seed = c.seed;
  const auto load = load_checkins(checkins_path);
  std::vector<LatLon> pts;
  pts.reserve(load.rows.size());
  for (const auto& r : load.rows) pts.push_back(r.loc());
  double ms = 0;
  KMeansResult res;
  ms = time_ms([&] { res = minibatch_kmeans(pts, cfg); });
  const auto regions = region_bounds(pts, res.assignment, res.centroids);
  save_regions_json(regions, c.out);
  std::printf("points=%zu dropped=%zu k=%zu iterations=%zu inertia_km2=%.6g millis=%.1f\n", pts.size(),
              load.dropped_invalid_coordinates, cfg.k, res.iterations, res.inertia, ms);
  return 0;
}

// Tasks: [{"id","lat","lon","alpha","beta","zeta","team_size","z_km","kappa"}]
std::vector<Task> read_tasks(const std::string& path, const json& defaults) {
  std::vector<Task> tasks;
  for (const auto& j : read_json(path)) {
    Task t;
    take(defaults, "alpha", t.alpha);
    take(defaults, "beta", t.beta);
    take(defaults, "zeta", t.zeta);
    take(defaults, "team_size", t.team_size);
    take(defaults, "z_km", t.z_km);
    take(defaults, "kappa", t.kappa);
    t.id = j.at("id").get<std::string>();
    t.loc = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    take(j, "alpha", t.alpha);
    take(j, "beta", t.beta);
    take(j, "zeta", t.zeta);
    take(j, "team_size", t.team_size);
    take(j, "z_km", t.z_km);
    take(j, "kappa", t.kappa);
    t.validate();
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// Workers: [{"id","lat","lon","len_km","num","trust_node"}]; trust_node is a graph node id.
std::vector<Worker> read_workers(const std::string& path, const TrustEvaluator& ev) {
  std::vector<Worker> workers;
  for (const auto& j : read_json(path)) {
    Worker w;
    w.id = j.at("id").get<std::string>();
    w.loc = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    take(j, "len_km", w.len_km);
    take(j, "num", w.num);
    const auto node = j.contains("trust_node") ? j.at("trust_node").get<std::string>() : w.id;
    const auto idx = ev.observed().find(node);
    if (!idx) throw std::invalid_argument("worker " + w.id + ": trust node " + node + " not in model");
    w.trust_node = *idx;
    workers.push_back(std::move(w));
  }
  return workers;
}

int cmd_recruit(std::optional<std::size_t> region, const std::string& regions_path, const std::string& tasks_path,
                const std::string& workers_path, const std::string& model_path, std::size_t iters,
                const Common& c) {
  const auto cfg_json = c.load();
  TabuConfig tabu;
  apply(section(cfg_json, "tabu"), tabu);
  if (iters) tabu.iterations = iters;
  tabu.seed = c.seed;
  const auto ev = TrustEvaluator::load(model_path);
  auto tasks = read_tasks(tasks_path, section(cfg_json, "task"));
  auto workers = read_workers(workers_path, ev);

  if (region) {
    if (regions_path.empty()) throw std::invalid_argument("--region needs --regions");
    const auto regions = load_regions_json(regions_path);
    const auto in_region = [&](const LatLon& p) { return regions[assign_to_region(p, regions)].id == *region; };
    std::erase_if(tasks, [&](const Task& t) { return !in_region(t.loc); });
    std::erase_if(workers, [&](const Worker& w) { return !in_region(w.loc); });
  }

  const std::size_t n = workers.size();
  PairMatrix value(n), auc(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto a = workers[i].trust_node, b = workers[j].trust_node;
      value(i, j) = trust_value(ev.level_between(a, b));
      auc(i, j) = pair_auc(a, b, ev.observed(), ev.accuracy());
    }

  const auto outcomes = recruit_tasks(tasks, workers, value, auc, tabu);
  auto out = open_out(c.out);
  out << "task_id,members,collab_members,qod,pl,feasible,millis\n";
  for (const auto& o : outcomes) {
    out << o.task_id << ',' << join_ids(o.execution_team, workers) << ','
        << join_ids(o.collaboration_team, workers) << ',' << o.qod << ',' << o.pl << ','
        << (o.feasible ? "true" : "false") << ',' << o.millis << '\n';
  }
  std::printf("tasks=%zu workers=%zu filled=%zu -> %s\n", tasks.size(), n,
              static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(),
                                                     [](const auto& o) { return o.filled; })),
              c.out.c_str());
  return 0;
}

int cmd_bench(const std::string& algos_csv, std::size_t instances, const std::string& seeds_csv,
              bool match_budget, const Common& c) {
  const auto cfg_json = c.load();
  InstanceParams ip;
  TabuConfig tabu;
  BaselineConfig base;
  apply(section(cfg_json, "instance"), ip);
  apply(section(cfg_json, "tabu"), tabu);
  apply(section(cfg_json, "baseline"), base);
  const auto algos = parse_algorithm_list(algos_csv);
  const auto seeds = seeds_csv.empty() ? std::vector<std::uint64_t>{c.seed} : parse_seeds(seeds_csv);

  auto out = open_out(c.out);
  out << "algo,instance,seed,candidates,team_size,qod,pl,evaluations,iterations,millis,members\n";
  for (std::size_t i = 0; i < instances; ++i) {
    const auto inst = random_instance(ip, mix_seed(c.seed, i));
    const auto g = inst.ucrg();
    for (auto a : algos)
      for (auto seed : seeds) {
        TabuConfig t = tabu;
        BaselineConfig b = base;
        t.seed = b.seed = seed;
        if (match_budget) b.max_evaluations = tsr_budget(t, g.size(), inst.task.team_size);
        SolverResult r;
        const double ms = time_ms([&] { r = solve(a, g, b, t); });
        std::string members;
        for (auto m : r.team) members += (members.empty() ? "" : ";") + g.members[m].id;
        out << algorithm_name(a) << ',' << i << ',' << seed << ',' << g.size() << ',' << inst.task.team_size
            << ',' << r.qod << ',' << privacy_loss(r.team, g.trust, g.auc) << ',' << r.evaluations << ','
            << r.iterations << ',' << ms << ',' << members << '\n';
      }
  }
  std::printf("%zu rows -> %s\n", instances * algos.size() * seeds.size(), c.out.c_str());
  return 0;
}

int cmd_simulate(const std::string& sweep, const std::string& algos_csv, const std::string& seeds_csv,
                 const std::string& model_path, const std::string& checkins_path, const std::string& regions_path,
                 std::size_t threads, const Common& c) {
  const auto cfg_json = c.load();
  ScenarioParams sp;
  SweepConfig cfg;
  apply(section(cfg_json, "scenario"), sp);
  apply(section(cfg_json, "tabu"), cfg.tabu);
  apply(section(cfg_json, "baseline"), cfg.base);
  take(section(cfg_json, "sweep"), "match_budget", cfg.match_budget);
  cfg.threads = threads;
  sp.seed = c.seed;

  std::vector<SweepKind> kinds;
  if (sweep == "all") {
    kinds = {SweepKind::Tasks6Regions, SweepKind::Workers200To1200, SweepKind::TasksSequential,
             SweepKind::Kappa10To70, SweepKind::Convergence};
  } else {
    kinds = {parse_sweep(sweep)};
  }
  // The worker sweep grows one region to 1200 workers.
  const bool needs_large = std::find(kinds.begin(), kinds.end(), SweepKind::Workers200To1200) != kinds.end();
  ScenarioParams params = sp;
  if (needs_large) params.workers_per_region = std::max<std::size_t>(params.workers_per_region, 1200);

  const auto build = [&](const ScenarioParams& p) {
    if (model_path.empty()) return synthetic_scenario(p);
    if (checkins_path.empty() || regions_path.empty())
      throw std::invalid_argument("--model needs --checkins and --regions");
    const auto ev = TrustEvaluator::load(model_path);
    const auto checkins = load_checkins(checkins_path).rows;
    const auto regions = load_regions_json(regions_path);
    return build_scenario(ev, checkins, regions, p);
  };

  const auto algos = parse_algorithm_list(algos_csv);
  const auto seeds = parse_seeds(seeds_csv);
  const Scenario base_scenario = build(sp);
  const Scenario large = needs_large ? build(params) : Scenario{};

  std::vector<SweepRow> rows;
  for (auto k : kinds) {
    const Scenario& s = (k == SweepKind::Workers200To1200) ? large : base_scenario;
    auto part = run_sweep(k, s, algos, seeds, cfg);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  write_sweep_csv(rows, c.out);
  std::printf("%zu rows -> %s\n", rows.size(), c.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-aware collaborative crowdsourcing toolkit"};
  app.require_subcommand(1);

  Common graph_c, embed_c, train_c, eval_c, part_c, rec_c, bench_c, sim_c;

  auto* graph = app.add_subcommand("graph", "Trust graph utilities");
  std::string graph_action, graph_path;
  graph->add_option("action", graph_action, "stats")->required();
  graph->add_option("path", graph_path, "Trust graph (src<TAB>dst<TAB>level)")->required()->check(CLI::ExistingFile);
  add_common(graph, graph_c, false);

  auto* embed = app.add_subcommand("embed", "Node2Vec embeddings");
  std::string embed_graph, embed_format = "bin";
  std::size_t embed_dim = 0;
  embed->add_option("--graph", embed_graph)->required()->check(CLI::ExistingFile);
  embed->add_option("--dim", embed_dim, "Embedding dimension (default 128)");
  embed->add_option("--format", embed_format)->check(CLI::IsMember({"bin", "csv"}));
  add_common(embed, embed_c);

  auto* ttrain = app.add_subcommand("trust-train", "Train the trust evaluation model");
  std::string tt_graph, tt_emb, tt_expert = "on", tt_metrics;
  double tt_split = 0.8;
  ttrain->add_option("--graph", tt_graph)->required()->check(CLI::ExistingFile);
  ttrain->add_option("--emb", tt_emb)->required()->check(CLI::ExistingFile);
  ttrain->add_option("--split", tt_split, "Train fraction")->check(CLI::Range(0.0, 1.0));
  ttrain->add_option("--expert", tt_expert, "on|off")->check(CLI::IsMember({"on", "off"}));
  ttrain->add_option("--metrics", tt_metrics, "Write test metrics CSV here");
  add_common(ttrain, train_c);

  auto* teval = app.add_subcommand("trust-eval", "Score node pairs with a trained model");
  std::string te_model, te_pairs;
  teval->add_option("--model", te_model)->required()->check(CLI::ExistingFile);
  teval->add_option("--pairs", te_pairs, "CSV of src,dst node ids")->required()->check(CLI::ExistingFile);
  add_common(teval, eval_c);

  auto* part = app.add_subcommand("partition", "Mini-batch k-means regions over check-ins");
  std::string pa_checkins;
  std::size_t pa_k = 0, pa_batch = 0;
  part->add_option("--checkins", pa_checkins)->required()->check(CLI::ExistingFile);
  part->add_option("--k", pa_k, "Clusters (default 100)");
  part->add_option("--batch", pa_batch, "Mini-batch size (default 3100)");
  add_common(part, part_c);

  auto* rec = app.add_subcommand("recruit", "Recruit teams for tasks with tabu search");
  std::optional<std::size_t> re_region;
  std::string re_regions, re_tasks, re_workers, re_trust;
  std::size_t re_iters = 0;
  rec->add_option("--region", re_region, "Only tasks and workers in this region");
  rec->add_option("--regions", re_regions, "regions.json from partition")->check(CLI::ExistingFile);
  rec->add_option("--tasks", re_tasks)->required()->check(CLI::ExistingFile);
  rec->add_option("--workers", re_workers)->required()->check(CLI::ExistingFile);
  rec->add_option("--trust", re_trust, "Trust model file")->required()->check(CLI::ExistingFile);
  rec->add_option("--iters", re_iters, "Tabu iterations (default 500)");
  add_common(rec, rec_c);

  auto* bench = app.add_subcommand("bench", "Compare solvers on random instances");
  std::string be_algos = "tsr,de,pso,vns,sa,gmpl,gmdb,gmab,random", be_seeds;
  std::size_t be_instances = 10;
  bool be_no_match = false;
  bench->add_option("--algos", be_algos);
  bench->add_option("--instances", be_instances);
  bench->add_option("--seeds", be_seeds, "Solver seeds, comma separated (default --seed)");
  bench->add_flag("--no-match-budget", be_no_match, "Use each baseline's own iteration budget");
  add_common(bench, bench_c);

  auto* sim = app.add_subcommand("simulate", "Run experiment sweeps");
  std::string si_sweep = "all", si_algos = "tsr,de,pso,vns,sa,gmpl,gmdb,gmab,random", si_seeds = "1,2,3";
  std::string si_model, si_checkins, si_regions;
  std::size_t si_threads = 1;
  sim->add_option("--sweep", si_sweep, "tasks_6regions|workers_200_1200|tasks_sequential|kappa_10_70|convergence|all");
  sim->add_option("--algos", si_algos);
  sim->add_option("--seeds", si_seeds, "Solver seeds, comma separated");
  sim->add_option("--model", si_model, "Trust model; omit for a synthetic scenario")->check(CLI::ExistingFile);
  sim->add_option("--checkins", si_checkins)->check(CLI::ExistingFile);
  sim->add_option("--regions", si_regions)->check(CLI::ExistingFile);
  sim->add_option("--threads", si_threads);
  add_common(sim, sim_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*graph) return cmd_graph(graph_action, graph_path, graph_c);
    if (*embed) return cmd_embed(embed_graph, embed_dim, embed_format, embed_c);
    if (*ttrain) return cmd_trust_train(tt_graph, tt_emb, tt_split, tt_expert, tt_metrics, train_c);
    if (*teval) return cmd_trust_eval(te_model, te_pairs, eval_c);
    if (*part) return cmd_partition(pa_checkins, pa_k, pa_batch, part_c);
    if (*rec) return cmd_recruit(re_region, re_regions, re_tasks, re_workers, re_trust, re_iters, rec_c);
    if (*bench) return cmd_bench(be_algos, be_instances, be_seeds, !be_no_match, bench_c);
    if (*sim) return cmd_simulate(si_sweep, si_algos, si_seeds, si_model, si_checkins, si_regions, si_threads, sim_c);
  } catch (const std::exception& e) {
    std::cerr << "cmcs: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
