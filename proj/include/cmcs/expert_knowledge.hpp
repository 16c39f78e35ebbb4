#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmcs/graph_store.hpp"

namespace cmcs {

enum class ExpertDirection : std::uint8_t { IncomingToAnchor, OutgoingFromAnchor };

/// A synthesized two-hop trust edge. For IncomingToAnchor the edge is
/// target -> anchor, for OutgoingFromAnchor it is anchor -> target.
struct ExpertEdge {
  NodeIndex src{0};
  NodeIndex dst{0};
  TrustLevel level{TrustLevel::Observer};
  ExpertDirection direction{ExpertDirection::OutgoingFromAnchor};
  NodeIndex anchor{0};
  std::vector<TrustLevel> path_levels;  // min-composition along each two-hop path
  std::size_t neighborhood{0};          // |N_I(anchor)| or |N_O(anchor)|
  std::optional<double> draw;           // Bernoulli draw Rd, present when neighborhood > 1
};

struct BernoulliConfig {
  double pr{0.5};
  std::uint64_t seed{1};
};

struct PrEstimate {
  double pr{0.5};
  std::size_t qualifying_pairs{0};
  std::size_t matches{0};
  bool defaulted{false};  // no qualifying pairs; pr fell back to 0.5
};

/// Over ordered pairs (a,c) with a direct edge and at least two two-hop paths
/// a->b->c, the fraction whose direct level equals the max over paths of
/// min(w(a,b), w(b,c)).
PrEstimate estimate_pr(const TrustGraph& train_graph);
PrEstimate estimate_pr(const EdgeSplit& split, const TrustGraph& g);

/// Level an expert edge receives given its path compositions, neighborhood size
/// and draw. Single-neighbor anchors take the min-composition of the only path;
/// otherwise Rd < pr selects the max over paths and Rd >= pr the min.
TrustLevel compose_expert_level(const std::vector<TrustLevel>& path_levels,
                                std::size_t neighborhood, std::optional<double> draw, double pr);

/// At most one incoming and one outgoing expert edge per anchor. The target is
/// the two-hop node with the lexicographically smallest id that is not adjacent
/// to the anchor. An ordered pair already produced by an earlier anchor is not
/// emitted twice.
std::vector<ExpertEdge> generate_expert_knowledge(const TrustGraph& g, const BernoulliConfig& cfg);

}  // namespace cmcs
