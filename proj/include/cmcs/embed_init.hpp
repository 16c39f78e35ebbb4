#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cmcs/graph_store.hpp"

namespace cmcs {

/// One row per graph node, in node-index order.
struct EmbeddingTable {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t size() const { return ids.size(); }

  /// Throws if the shape is inconsistent or any value is non-finite.
  void validate() const;
};

struct WalkConfig {
  double p{1.0};  // return bias
  double q{1.0};  // in-out bias
  std::size_t walk_len{40};
  std::size_t walks_per_node{10};
  std::uint64_t seed{1};
};

using Walk = std::vector<NodeIndex>;

/// Undirected neighbor sets (union of in/out neighbors), sorted.
std::vector<std::vector<NodeIndex>> undirected_adjacency(const TrustGraph& g);

/// Second-order biased walks on the undirected view of g. Isolated nodes start
/// no walks.
std::vector<Walk> generate_walks(const TrustGraph& g, const WalkConfig& cfg);

struct SkipGramConfig {
  std::size_t dim{128};
  std::size_t window{5};
  std::size_t negatives{5};
  std::size_t epochs{3};
  double lr{0.025};
  std::uint64_t seed{1};
};

struct SkipGramResult {
  EmbeddingTable table;
  std::vector<double> epoch_losses;  // mean negative-sampling loss per epoch
};

/// Starts from deterministic_init(g, dim, seed) so nodes absent from every walk
/// keep their fallback vectors.
SkipGramResult train_skipgram(const TrustGraph& g, const std::vector<Walk>& walks,
                              const SkipGramConfig& cfg);

/// Uniform in [-1/dim, 1/dim], reproducible per (node id, seed).
EmbeddingTable deterministic_init(const TrustGraph& g, std::size_t dim, std::uint64_t seed);

/// Walks + skip-gram in one call.
EmbeddingTable node2vec_embeddings(const TrustGraph& g, const WalkConfig& walk_cfg,
                                   const SkipGramConfig& sg_cfg);

void save_embeddings(const EmbeddingTable& t, const std::filesystem::path& path);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings_csv(const EmbeddingTable& t, const std::filesystem::path& path);

/// Reorders rows to follow g's node order. Throws if a graph node is missing.
EmbeddingTable align_embeddings(const EmbeddingTable& t, const TrustGraph& g);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value);
std::uint64_t hash_string(std::string_view s);

}  // namespace cmcs
