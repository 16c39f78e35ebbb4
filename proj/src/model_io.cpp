// Binary layout of a trust model file (little-endian); see docs/model_format.md.
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cmcs/tref.hpp"

namespace cmcs {

namespace {

constexpr char kModelMagic[8] = {'C', 'M', 'C', 'S', 'T', 'R', 'E', 'F'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("model file truncated");
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put(out, static_cast<std::uint32_t>(m.rows()));
  put(out, static_cast<std::uint32_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  const auto rows = get<std::uint32_t>(in);
  const auto cols = get<std::uint32_t>(in);
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  if (!in) throw std::runtime_error("model file truncated");
  return m;
}

}  // namespace

void TrustEvaluator::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kModelMagic, sizeof kModelMagic);
  put(out, kModelVersion);
  put(out, static_cast<std::uint32_t>(model_.input_dim));
  put(out, static_cast<std::uint32_t>(model_.edge_dim));
  put(out, static_cast<std::uint32_t>(model_.layer_dims.size()));
  for (auto d : model_.layer_dims) put(out, static_cast<std::uint32_t>(d));
  put(out, static_cast<std::uint8_t>(model_.shared_expert_weights ? 1 : 0));
  put(out, accuracy_);

  put(out, static_cast<std::uint64_t>(observed_.num_nodes()));
  for (NodeIndex u = 0; u < observed_.num_nodes(); ++u) {
    const auto& id = observed_.node_id(u);
    put(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (const auto* t : model_.tensors()) put_matrix(out, *t);
  put_matrix(out, out_);
  put_matrix(out, in_);

  const auto edges = observed_.edges();
  put(out, static_cast<std::uint64_t>(edges.size()));
  for (const auto& e : edges) {
    put(out, e.src);
    put(out, e.dst);
    put(out, static_cast<std::uint8_t>(level_index(e.level)));
    put(out, static_cast<std::uint8_t>(message_graph_.has_edge(e.src, e.dst) ? 1 : 0));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TrustEvaluator TrustEvaluator::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a trust model file: " + path.string());
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw std::runtime_error("unsupported model version " + std::to_string(version));
  }
  TrefModel m;
  m.input_dim = get<std::uint32_t>(in);
  m.edge_dim = get<std::uint32_t>(in);
  const auto n_layers = get<std::uint32_t>(in);
  for (std::uint32_t l = 0; l < n_layers; ++l) m.layer_dims.push_back(get<std::uint32_t>(in));
  m.shared_expert_weights = get<std::uint8_t>(in) != 0;
  m.layers.resize(n_layers);
  const double accuracy = get<double>(in);

  TrustGraph observed;
  const auto n_nodes = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_nodes; ++i) {
    const auto len = get<std::uint32_t>(in);
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (observed.add_node(id) != i) throw std::runtime_error("duplicate node id in model file");
  }
  for (auto* t : m.tensors()) *t = get_matrix(in);
  TrustState state;
  state.h_out.push_back(get_matrix(in));
  state.h_in.push_back(get_matrix(in));

  std::vector<TrustEdge> message_edges;
  const auto n_edges = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_edges; ++i) {
    TrustEdge e;
    e.src = get<std::uint32_t>(in);
    e.dst = get<std::uint32_t>(in);
    const auto lvl = get<std::uint8_t>(in);
    if (lvl >= kNumLevels) throw std::runtime_error("bad trust level in model file");
    e.level = level_from_index(lvl);
    observed.set_edge(e.src, e.dst, e.level);
    if (get<std::uint8_t>(in) != 0) message_edges.push_back(e);
  }
  TrustGraph message = observed.with_edges(message_edges);
  return TrustEvaluator(std::move(m), std::move(state), std::move(observed), std::move(message),
                        accuracy);
}

}  // namespace cmcs
