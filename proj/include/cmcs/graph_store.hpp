#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmcs/geo.hpp"

namespace cmcs {

/// Ordinal trustworthiness category. The underlying value is the one-hot slot.
enum class TrustLevel : std::uint8_t { Observer = 0, Apprentice = 1, Journeyer = 2, Master = 3 };

inline constexpr std::size_t kNumLevels = 4;
inline constexpr std::array<TrustLevel, kNumLevels> kAllLevels = {
    TrustLevel::Observer, TrustLevel::Apprentice, TrustLevel::Journeyer, TrustLevel::Master};

inline constexpr std::size_t level_index(TrustLevel l) { return static_cast<std::size_t>(l); }
inline constexpr TrustLevel level_from_index(std::size_t i) { return static_cast<TrustLevel>(i); }

std::array<double, kNumLevels> one_hot(TrustLevel level);

/// Real-valued trust: Observer 0.5, Apprentice 1, Journeyer 2, Master 3.
double trust_value(TrustLevel level);

std::string_view level_name(TrustLevel level);

/// Case-insensitive; nullopt for unknown tokens.
std::optional<TrustLevel> parse_level(std::string_view token);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using NodeIndex = std::uint32_t;

struct TrustEdge {
  NodeIndex src{0};
  NodeIndex dst{0};
  TrustLevel level{TrustLevel::Observer};

  friend bool operator==(const TrustEdge&, const TrustEdge&) = default;
};

struct Neighbor {
  NodeIndex node{0};
  TrustLevel level{TrustLevel::Observer};
};

/// Directed trust graph with opaque string node ids interned to dense indices.
/// At most one edge per ordered pair, no self-loops. Neighbor lists are kept
/// sorted by node index.
class TrustGraph {
 public:
  NodeIndex add_node(std::string_view id);

  /// Inserts or overwrites (src,dst). Returns false for self-loops (not stored).
  bool set_edge(NodeIndex src, NodeIndex dst, TrustLevel level);

  std::size_t num_nodes() const noexcept { return ids_.size(); }
  std::size_t num_edges() const noexcept { return edge_count_; }

  const std::string& node_id(NodeIndex u) const { return ids_.at(u); }
  std::optional<NodeIndex> find(std::string_view id) const;

  std::optional<TrustLevel> level(NodeIndex src, NodeIndex dst) const;
  bool has_edge(NodeIndex src, NodeIndex dst) const { return level(src, dst).has_value(); }
  bool adjacent(NodeIndex a, NodeIndex b) const { return has_edge(a, b) || has_edge(b, a); }

  std::span<const Neighbor> out_neighbors(NodeIndex u) const { return out_.at(u); }
  std::span<const Neighbor> in_neighbors(NodeIndex u) const { return in_.at(u); }
  std::size_t out_degree(NodeIndex u) const { return out_.at(u).size(); }
  std::size_t in_degree(NodeIndex u) const { return in_.at(u).size(); }

  /// All edges ordered by (src, dst).
  std::vector<TrustEdge> edges() const;

  /// Same node table, edge set replaced.
  TrustGraph with_edges(std::span<const TrustEdge> edges) const;

  /// Throws std::logic_error if the in/out indices disagree.
  void validate() const;

  friend bool operator==(const TrustGraph& a, const TrustGraph& b);

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<Neighbor>> out_;
  std::vector<std::vector<Neighbor>> in_;
  std::size_t edge_count_{0};
};

struct GraphLoadReport {
  std::size_t lines{0};
  std::size_t self_loops_dropped{0};
  std::size_t duplicates_replaced{0};
};

struct LoadedGraph {
  TrustGraph graph;
  GraphLoadReport report;
};

/// Reads `src<TAB>dst<TAB>level` lines. Blank lines and lines starting with
/// '#' or '%' are skipped.
LoadedGraph load_trust_graph(const std::filesystem::path& path);
LoadedGraph parse_trust_graph(std::string_view text);
void save_trust_graph(const TrustGraph& g, const std::filesystem::path& path);

struct GraphStats {
  std::size_t nodes{0};
  std::size_t edges{0};
  double density{0.0};
  double average_degree{0.0};  // edges / nodes
};

GraphStats graph_stats(const TrustGraph& g);

struct EdgeSplit {
  std::vector<TrustEdge> train;
  std::vector<TrustEdge> test;
  std::uint64_t seed{0};
};

/// Seeded shuffle, then the first round(fraction * |E|) edges go to train.
EdgeSplit split_edges(const TrustGraph& g, double train_fraction, std::uint64_t seed);

using TimePoint = std::chrono::sys_seconds;

struct CheckIn {
  std::string user;
  TimePoint time{};
  double lat{0.0};
  double lon{0.0};

  LatLon loc() const { return {lat, lon}; }
};

struct CheckInLoad {
  std::vector<CheckIn> rows;
  std::size_t dropped_invalid_coordinates{0};
};

/// ISO-8601 `YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+hh:mm|-hh:mm]`, normalized to UTC.
std::optional<TimePoint> parse_iso8601(std::string_view text);
std::string format_iso8601(TimePoint t);

/// CSV with header `user_id,timestamp,lat,lon`.
CheckInLoad load_checkins(const std::filesystem::path& path);
CheckInLoad parse_checkins(std::string_view text);

struct WorkerHistory {
  double len_km{0.0};
  std::size_t num{0};
};

/// Per-user check-in count and haversine mileage along the time-ordered trace.
std::map<std::string, WorkerHistory> worker_history(std::span<const CheckIn> checkins);

}  // namespace cmcs
