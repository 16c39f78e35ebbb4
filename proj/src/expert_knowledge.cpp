#include "cmcs/expert_knowledge.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace cmcs {

namespace {

TrustLevel min_level(TrustLevel a, TrustLevel b) { return level_index(a) < level_index(b) ? a : b; }
TrustLevel max_level(TrustLevel a, TrustLevel b) { return level_index(a) < level_index(b) ? b : a; }

struct Candidate {
  NodeIndex target;
  std::vector<TrustLevel> paths;
};

// Two-hop candidates from `anchor` following `first` then `second` hops.
// Incoming: first = in_neighbors(anchor), second = in_neighbors(mid).
// Outgoing: first = out_neighbors(anchor), second = out_neighbors(mid).
std::optional<Candidate> pick_target(const TrustGraph& g, NodeIndex anchor, bool incoming) {
  std::map<NodeIndex, std::vector<TrustLevel>> paths;
  const auto first = incoming ? g.in_neighbors(anchor) : g.out_neighbors(anchor);
  for (const auto& mid : first) {
    const auto second = incoming ? g.in_neighbors(mid.node) : g.out_neighbors(mid.node);
    for (const auto& far : second) {
      if (far.node == anchor || g.adjacent(anchor, far.node)) continue;
      paths[far.node].push_back(min_level(mid.level, far.level));
    }
  }
  if (paths.empty()) return std::nullopt;
  auto best = paths.begin();
  for (auto it = paths.begin(); it != paths.end(); ++it) {
    if (g.node_id(it->first) < g.node_id(best->first)) best = it;
  }
  return Candidate{best->first, std::move(best->second)};
}

}  // namespace

PrEstimate estimate_pr(const TrustGraph& g) {
  PrEstimate est;
  for (NodeIndex a = 0; a < g.num_nodes(); ++a) {
    for (const auto& direct : g.out_neighbors(a)) {
      const NodeIndex c = direct.node;
      std::size_t count = 0;
      TrustLevel best = TrustLevel::Observer;
      for (const auto& mid : g.out_neighbors(a)) {
        if (mid.node == c) continue;
        if (auto second = g.level(mid.node, c)) {
          const auto composed = min_level(mid.level, *second);
          best = count == 0 ? composed : max_level(best, composed);
          ++count;
        }
      }
      if (count < 2) continue;
      ++est.qualifying_pairs;
      if (best == direct.level) ++est.matches;
    }
  }
  if (est.qualifying_pairs == 0) {
    std::cerr << "warning: estimate_pr found no qualifying pairs; using 0.5\n";
    est.pr = 0.5;
    est.defaulted = true;
  } else {
    est.pr = static_cast<double>(est.matches) / static_cast<double>(est.qualifying_pairs);
  }
  return est;
}

PrEstimate estimate_pr(const EdgeSplit& split, const TrustGraph& g) {
  return estimate_pr(g.with_edges(split.train));
}

TrustLevel compose_expert_level(const std::vector<TrustLevel>& path_levels,
                                std::size_t neighborhood, std::optional<double> draw, double pr) {
  if (path_levels.empty()) throw std::invalid_argument("compose_expert_level: no paths");
  const auto [lo, hi] = std::minmax_element(path_levels.begin(), path_levels.end(),
                                            [](TrustLevel a, TrustLevel b) {
                                              return level_index(a) < level_index(b);
                                            });
  if (neighborhood <= 1) return *lo;
  if (!draw) throw std::invalid_argument("compose_expert_level: draw required");
  return *draw < pr ? *hi : *lo;
}

std::vector<ExpertEdge> generate_expert_knowledge(const TrustGraph& g, const BernoulliConfig& cfg) {
  if (g.num_nodes() == 0) throw std::invalid_argument("generate_expert_knowledge: empty graph");
  if (!(cfg.pr >= 0.0 && cfg.pr <= 1.0)) throw std::invalid_argument("Bernoulli pr must lie in [0,1]");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<std::pair<NodeIndex, NodeIndex>> emitted;
  std::vector<ExpertEdge> out;

  for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
    for (const bool incoming : {true, false}) {
      auto cand = pick_target(g, u, incoming);
      if (!cand) continue;
      ExpertEdge e;
      e.anchor = u;
      e.direction = incoming ? ExpertDirection::IncomingToAnchor : ExpertDirection::OutgoingFromAnchor;
      e.src = incoming ? cand->target : u;
      e.dst = incoming ? u : cand->target;
      e.neighborhood = incoming ? g.in_degree(u) : g.out_degree(u);
      e.path_levels = std::move(cand->paths);
      if (e.neighborhood > 1) e.draw = unit(rng);
      e.level = compose_expert_level(e.path_levels, e.neighborhood, e.draw, cfg.pr);
      if (!emitted.emplace(e.src, e.dst).second) continue;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace cmcs
