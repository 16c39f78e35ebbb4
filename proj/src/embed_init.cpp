#include "cmcs/embed_init.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace cmcs {

namespace {

constexpr char kEmbeddingMagic[8] = {'C', 'M', 'C', 'S', 'E', 'M', 'B', '1'};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("embedding file truncated");
  return v;
}

bool sorted_contains(const std::vector<NodeIndex>& v, NodeIndex x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(splitmix64(seed) ^ (value + 0x632be59bd9b4e019ULL));
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void EmbeddingTable::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != ids.size()) {
    throw std::logic_error("embedding table: row count does not match id count");
  }
  if (!vectors.allFinite()) throw std::logic_error("embedding table: non-finite value");
}

std::vector<std::vector<NodeIndex>> undirected_adjacency(const TrustGraph& g) {
  std::vector<std::vector<NodeIndex>> adj(g.num_nodes());
  for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
    auto& a = adj[u];
    for (const auto& n : g.out_neighbors(u)) a.push_back(n.node);
    for (const auto& n : g.in_neighbors(u)) a.push_back(n.node);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

std::vector<Walk> generate_walks(const TrustGraph& g, const WalkConfig& cfg) {
  if (g.num_nodes() == 0) throw std::invalid_argument("generate_walks: empty graph");
  if (cfg.walk_len < 2) throw std::invalid_argument("generate_walks: walk_len must be >= 2");
  if (!(cfg.p > 0.0) || !(cfg.q > 0.0)) throw std::invalid_argument("generate_walks: p, q > 0");
  const auto adj = undirected_adjacency(g);
  const bool uniform = cfg.p == 1.0 && cfg.q == 1.0;

  std::vector<Walk> walks;
  walks.reserve(g.num_nodes() * cfg.walks_per_node);
  std::vector<double> weights;
  for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
    for (NodeIndex start = 0; start < g.num_nodes(); ++start) {
      if (adj[start].empty()) continue;
      std::mt19937_64 rng(mix_seed(mix_seed(cfg.seed, hash_string(g.node_id(start))), r));
      Walk walk{start};
      walk.reserve(cfg.walk_len);
      while (walk.size() < cfg.walk_len) {
        const NodeIndex cur = walk.back();
        const auto& nbrs = adj[cur];
        if (nbrs.empty()) break;
        if (walk.size() == 1 || uniform) {
          std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
          walk.push_back(nbrs[pick(rng)]);
          continue;
        }
        const NodeIndex prev = walk[walk.size() - 2];
        weights.resize(nbrs.size());
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
          if (nbrs[i] == prev) {
            weights[i] = 1.0 / cfg.p;
          } else if (sorted_contains(adj[prev], nbrs[i])) {
            weights[i] = 1.0;
          } else {
            weights[i] = 1.0 / cfg.q;
          }
        }
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        walk.push_back(nbrs[pick(rng)]);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

EmbeddingTable deterministic_init(const TrustGraph& g, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("deterministic_init: dim must be >= 1");
  EmbeddingTable t;
  t.vectors.resize(static_cast<Eigen::Index>(g.num_nodes()), static_cast<Eigen::Index>(dim));
  const double bound = 1.0 / static_cast<double>(dim);
  for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
    t.ids.push_back(g.node_id(u));
    std::mt19937_64 rng(mix_seed(seed, hash_string(g.node_id(u))));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t k = 0; k < dim; ++k) t.vectors(u, static_cast<Eigen::Index>(k)) = dist(rng);
  }
  return t;
}

SkipGramResult train_skipgram(const TrustGraph& g, const std::vector<Walk>& walks,
                              const SkipGramConfig& cfg) {
  if (cfg.dim == 0) throw std::invalid_argument("train_skipgram: dim must be >= 1");
  if (walks.empty()) throw std::invalid_argument("train_skipgram: no walks");

  SkipGramResult result;
  result.table = deterministic_init(g, cfg.dim, cfg.seed);
  if (cfg.epochs == 0) return result;

  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto dim = static_cast<Eigen::Index>(cfg.dim);
  Eigen::MatrixXd& in = result.table.vectors;
  Eigen::MatrixXd ctx = Eigen::MatrixXd::Zero(n, dim);

  // Unigram^0.75 noise distribution.
  std::vector<double> freq(g.num_nodes(), 0.0);
  std::size_t tokens = 0;
  for (const auto& w : walks) {
    for (NodeIndex v : w) freq[v] += 1.0;
    tokens += w.size();
  }
  for (auto& f : freq) f = std::pow(f, 0.75);
  std::discrete_distribution<NodeIndex> noise(freq.begin(), freq.end());

  std::mt19937_64 rng(mix_seed(cfg.seed, 0x5eed));
  std::uniform_int_distribution<std::size_t> shrink(0, cfg.window > 0 ? cfg.window - 1 : 0);
  const double total_steps = static_cast<double>(cfg.epochs) * static_cast<double>(tokens);
  double step = 0.0;

  Eigen::VectorXd grad_in(dim);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& walk : walks) {
      for (std::size_t pos = 0; pos < walk.size(); ++pos, step += 1.0) {
        const double lr = std::max(cfg.lr * (1.0 - step / total_steps), cfg.lr * 1e-4);
        const std::size_t b = shrink(rng);
        const std::size_t span = cfg.window - b;
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(walk.size() - 1, pos + span);
        const NodeIndex center = walk[pos];
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          const NodeIndex context = walk[c];
          grad_in.setZero();
          double pair_loss = 0.0;
          for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            NodeIndex target = context;
            double label = 1.0;
            if (k > 0) {
              target = noise(rng);
              if (target == context) continue;
              label = 0.0;
            }
            const double score = in.row(center).dot(ctx.row(target));
            pair_loss += label > 0 ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
            const double g_score = (label - sigmoid(score)) * lr;
            grad_in += g_score * ctx.row(target).transpose();
            ctx.row(target) += g_score * in.row(center);
          }
          in.row(center) += grad_in.transpose();
          if (!std::isfinite(pair_loss)) {
            throw std::runtime_error("train_skipgram: non-finite loss in epoch " +
                                     std::to_string(epoch));
          }
          loss_sum += pair_loss;
          ++pairs;
        }
      }
    }
    result.epoch_losses.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  result.table.validate();
  return result;
}

EmbeddingTable node2vec_embeddings(const TrustGraph& g, const WalkConfig& walk_cfg,
                                   const SkipGramConfig& sg_cfg) {
  const auto walks = generate_walks(g, walk_cfg);
  if (walks.empty()) return deterministic_init(g, sg_cfg.dim, sg_cfg.seed);
  return train_skipgram(g, walks, sg_cfg).table;
}

void save_embeddings(const EmbeddingTable& t, const std::filesystem::path& path) {
  t.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kEmbeddingMagic, sizeof kEmbeddingMagic);
  write_pod(out, static_cast<std::uint32_t>(t.dim()));
  write_pod(out, static_cast<std::uint64_t>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    write_pod(out, static_cast<std::uint32_t>(t.ids[i].size()));
    out.write(t.ids[i].data(), static_cast<std::streamsize>(t.ids[i].size()));
    for (Eigen::Index k = 0; k < t.vectors.cols(); ++k) {
      write_pod(out, t.vectors(static_cast<Eigen::Index>(i), k));
    }
  }
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kEmbeddingMagic, sizeof magic) != 0) {
    throw std::runtime_error("not an embedding file: " + path.string());
  }
  const auto dim = read_pod<std::uint32_t>(in);
  const auto count = read_pod<std::uint64_t>(in);
  EmbeddingTable t;
  t.vectors.resize(static_cast<Eigen::Index>(count), dim);
  t.ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string id(len, '\0');
    in.read(id.data(), len);
    t.ids.push_back(std::move(id));
    for (std::uint32_t k = 0; k < dim; ++k) {
      t.vectors(static_cast<Eigen::Index>(i), k) = read_pod<double>(in);
    }
  }
  t.validate();
  return t;
}

void save_embeddings_csv(const EmbeddingTable& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "node_id";
  for (std::size_t k = 0; k < t.dim(); ++k) out << ",v" << k;
  out << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t.ids[i];
    for (Eigen::Index k = 0; k < t.vectors.cols(); ++k) {
      out << ',' << t.vectors(static_cast<Eigen::Index>(i), k);
    }
    out << '\n';
  }
}

EmbeddingTable align_embeddings(const EmbeddingTable& t, const TrustGraph& g) {
  std::unordered_map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < t.size(); ++i) row.emplace(t.ids[i], i);
  EmbeddingTable out;
  out.vectors.resize(static_cast<Eigen::Index>(g.num_nodes()), t.vectors.cols());
  for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
    auto it = row.find(g.node_id(u));
    if (it == row.end()) throw std::runtime_error("no embedding for node " + g.node_id(u));
    out.ids.push_back(g.node_id(u));
    out.vectors.row(u) = t.vectors.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

}  // namespace cmcs
