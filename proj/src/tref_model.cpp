#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cmcs/tref.hpp"

namespace cmcs {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

constexpr double kProbFloor = 1e-12;

SparseMatrix mean_matrix(std::size_t n, const std::vector<std::vector<NodeIndex>>& nbrs) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t u = 0; u < n; ++u) {
    if (nbrs[u].empty()) continue;
    const double w = 1.0 / static_cast<double>(nbrs[u].size());
    for (NodeIndex v : nbrs[u]) trips.emplace_back(static_cast<int>(u), static_cast<int>(v), w);
  }
  SparseMatrix m(static_cast<Index>(n), static_cast<Index>(n));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

MatrixXd glorot(Index rows, Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

const MatrixXd& expert_weights(const LayerParams& p, bool out, bool shared) {
  if (shared) return out ? p.edge_out : p.edge_in;
  return out ? p.edge_out_expert : p.edge_in_expert;
}

void check_finite(const MatrixXd& h, std::size_t layer, const char* channel) {
  if (h.allFinite()) return;
  for (Index u = 0; u < h.rows(); ++u) {
    if (!h.row(u).allFinite()) {
      std::ostringstream msg;
      msg << "non-finite activation in layer " << layer << " (" << channel << " channel) at node "
          << u;
      throw std::runtime_error(msg.str());
    }
  }
}

MatrixXd dropout_mask(Index rows, Index cols, double rate, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = keep(rng) ? scale : 0.0;
  return m;
}

// Head logits for each labeled pair, B x 4.
MatrixXd head_features(const TrustState& s, std::span<const TrustEdge> batch) {
  const Index d = s.final_out().cols();
  MatrixXd f(static_cast<Index>(batch.size()), 2 * d);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    f.row(static_cast<Index>(b)).head(d) = s.final_out().row(batch[b].src);
    f.row(static_cast<Index>(b)).tail(d) = s.final_in().row(batch[b].dst);
  }
  return f;
}

}  // namespace

PropagationGraph build_propagation_graph(const TrustGraph& base, std::span<const ExpertEdge> experts) {
  const std::size_t n = base.num_nodes();
  std::vector<std::vector<NodeIndex>> out_n(n), in_n(n);
  PropagationGraph pg;
  pg.num_nodes = n;
  pg.out_hist = MatrixXd::Zero(static_cast<Index>(n), kNumLevels);
  pg.in_hist = MatrixXd::Zero(static_cast<Index>(n), kNumLevels);
  pg.out_hist_expert = MatrixXd::Zero(static_cast<Index>(n), kNumLevels);
  pg.in_hist_expert = MatrixXd::Zero(static_cast<Index>(n), kNumLevels);
  for (const auto& e : base.edges()) {
    out_n[e.src].push_back(e.dst);
    in_n[e.dst].push_back(e.src);
    pg.out_hist(e.src, static_cast<Index>(level_index(e.level))) += 1.0;
    pg.in_hist(e.dst, static_cast<Index>(level_index(e.level))) += 1.0;
  }
  for (const auto& e : experts) {
    if (base.has_edge(e.src, e.dst)) throw std::invalid_argument("expert edge duplicates a base edge");
    out_n[e.src].push_back(e.dst);
    in_n[e.dst].push_back(e.src);
    pg.out_hist_expert(e.src, static_cast<Index>(level_index(e.level))) += 1.0;
    pg.in_hist_expert(e.dst, static_cast<Index>(level_index(e.level))) += 1.0;
  }
  for (std::size_t u = 0; u < n; ++u) {
    const auto iu = static_cast<Index>(u);
    if (!out_n[u].empty()) {
      const double inv = 1.0 / static_cast<double>(out_n[u].size());
      pg.out_hist.row(iu) *= inv;
      pg.out_hist_expert.row(iu) *= inv;
    }
    if (!in_n[u].empty()) {
      const double inv = 1.0 / static_cast<double>(in_n[u].size());
      pg.in_hist.row(iu) *= inv;
      pg.in_hist_expert.row(iu) *= inv;
    }
  }
  pg.out_mean = mean_matrix(n, out_n);
  pg.in_mean = mean_matrix(n, in_n);
  return pg;
}

TrefModel TrefModel::init(std::size_t input_dim, std::vector<std::size_t> layer_dims,
                          std::size_t edge_dim, std::uint64_t seed, bool shared_expert_weights) {
  if (input_dim == 0 || edge_dim == 0) throw std::invalid_argument("TrefModel: zero dimension");
  TrefModel m;
  m.input_dim = input_dim;
  m.edge_dim = edge_dim;
  m.layer_dims = std::move(layer_dims);
  m.shared_expert_weights = shared_expert_weights;
  std::mt19937_64 rng(seed);
  const auto e = static_cast<Index>(edge_dim);
  auto prev = static_cast<Index>(input_dim);
  for (std::size_t dim : m.layer_dims) {
    const auto d = static_cast<Index>(dim);
    LayerParams p;
    p.edge_out = glorot(e, kNumLevels, rng);
    p.edge_in = glorot(e, kNumLevels, rng);
    if (!shared_expert_weights) {
      p.edge_out_expert = glorot(e, kNumLevels, rng);
      p.edge_in_expert = glorot(e, kNumLevels, rng);
    }
    p.w_out = glorot(d, prev + e, rng);
    p.b_out = MatrixXd::Zero(1, d);
    p.w_in = glorot(d, prev + e, rng);
    p.b_in = MatrixXd::Zero(1, d);
    m.layers.push_back(std::move(p));
    prev = d;
  }
  m.head = glorot(kNumLevels, 2 * prev, rng);
  return m;
}

TrefModel TrefModel::zeros_like() const {
  TrefModel z = *this;
  for (auto* t : z.tensors()) t->setZero();
  return z;
}

std::vector<MatrixXd*> TrefModel::tensors() {
  std::vector<MatrixXd*> out;
  for (auto& p : layers) {
    out.push_back(&p.edge_out);
    out.push_back(&p.edge_in);
    if (!shared_expert_weights) {
      out.push_back(&p.edge_out_expert);
      out.push_back(&p.edge_in_expert);
    }
    out.push_back(&p.w_out);
    out.push_back(&p.b_out);
    out.push_back(&p.w_in);
    out.push_back(&p.b_in);
  }
  out.push_back(&head);
  return out;
}

std::vector<const MatrixXd*> TrefModel::tensors() const {
  auto mut = const_cast<TrefModel*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::vector<std::string> TrefModel::tensor_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    names.push_back(p + "edge_out");
    names.push_back(p + "edge_in");
    if (!shared_expert_weights) {
      names.push_back(p + "edge_out_expert");
      names.push_back(p + "edge_in_expert");
    }
    names.push_back(p + "w_out");
    names.push_back(p + "b_out");
    names.push_back(p + "w_in");
    names.push_back(p + "b_in");
  }
  names.push_back("head");
  return names;
}

double TrefModel::squared_norm() const {
  double s = 0.0;
  for (const auto* t : tensors()) s += t->squaredNorm();
  return s;
}

bool TrefModel::all_finite() const {
  for (const auto* t : tensors())
    if (!t->allFinite()) return false;
  return true;
}

TrustState forward(const PropagationGraph& pg, const MatrixXd& x, const TrefModel& model,
                   ForwardTrace* trace, const DropoutSpec* dropout) {
  if (static_cast<std::size_t>(x.rows()) != pg.num_nodes ||
      static_cast<std::size_t>(x.cols()) != model.input_dim) {
    throw std::invalid_argument("forward: embedding shape does not match graph/model");
  }
  TrustState s;
  s.h_out.push_back(x);
  s.h_in.push_back(x);
  if (trace) *trace = ForwardTrace{};
  const bool drop = dropout && dropout->rate > 0.0;
  std::mt19937_64 rng(dropout ? dropout->seed : 0);
  const auto n = static_cast<Index>(pg.num_nodes);
  const auto e = static_cast<Index>(model.edge_dim);

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& p = model.layers[l];
    const Index prev = s.h_out.back().cols();
    for (const bool out_channel : {true, false}) {
      const auto& mean = out_channel ? pg.out_mean : pg.in_mean;
      const auto& hist = out_channel ? pg.out_hist : pg.in_hist;
      const auto& hist_x = out_channel ? pg.out_hist_expert : pg.in_hist_expert;
      const auto& w_edge = out_channel ? p.edge_out : p.edge_in;
      const auto& w_edge_x = expert_weights(p, out_channel, model.shared_expert_weights);
      const auto& w = out_channel ? p.w_out : p.w_in;
      const auto& b = out_channel ? p.b_out : p.b_in;
      const auto& h_prev = out_channel ? s.h_out.back() : s.h_in.back();

      MatrixXd agg(n, prev + e);
      agg.leftCols(prev) = mean * h_prev;
      agg.rightCols(e) = hist * w_edge.transpose() + hist_x * w_edge_x.transpose();
      MatrixXd pre = agg * w.transpose();
      pre.rowwise() += b.row(0);
      MatrixXd h = pre.cwiseMax(0.0);
      MatrixXd mask;
      if (drop) {
        mask = dropout_mask(h.rows(), h.cols(), dropout->rate, rng);
        h = h.cwiseProduct(mask);
      }
      check_finite(h, l + 1, out_channel ? "out" : "in");
      if (trace) {
        (out_channel ? trace->agg_out : trace->agg_in).push_back(std::move(agg));
        (out_channel ? trace->pre_out : trace->pre_in).push_back(std::move(pre));
        (out_channel ? trace->mask_out : trace->mask_in).push_back(std::move(mask));
      }
      (out_channel ? s.h_out : s.h_in).push_back(std::move(h));
    }
  }
  return s;
}

std::array<double, kNumLevels> softmax(const std::array<double, kNumLevels>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::array<double, kNumLevels> p{};
  double z = 0.0;
  for (std::size_t c = 0; c < kNumLevels; ++c) z += (p[c] = std::exp(logits[c] - mx));
  for (auto& v : p) v /= z;
  return p;
}

TrustLevel argmax_level(const std::array<double, kNumLevels>& probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumLevels; ++c)
    if (probs[c] > probs[best]) best = c;
  return level_from_index(best);
}

LevelPrediction predict_level(const TrustState& state, const TrefModel& model, NodeIndex src,
                              NodeIndex dst) {
  return predict_level(state.final_out(), state.final_in(), model, src, dst);
}

LevelPrediction predict_level(const MatrixXd& final_out, const MatrixXd& final_in,
                              const TrefModel& model, NodeIndex src, NodeIndex dst) {
  const auto n = static_cast<NodeIndex>(final_out.rows());
  if (src >= n || dst >= n) throw std::out_of_range("predict_level: unknown node");
  const Index d = final_out.cols();
  Eigen::VectorXd f(2 * d);
  f.head(d) = final_out.row(src).transpose();
  f.tail(d) = final_in.row(dst).transpose();
  const Eigen::VectorXd z = model.head * f;
  std::array<double, kNumLevels> logits{};
  for (std::size_t c = 0; c < kNumLevels; ++c) logits[c] = z(static_cast<Index>(c));
  LevelPrediction out;
  out.probs = softmax(logits);
  out.level = argmax_level(out.probs);
  return out;
}

double loss(std::span<const std::array<double, kNumLevels>> predictions,
            std::span<const TrustLevel> labels, double l2, const TrefModel& model) {
  if (predictions.size() != labels.size()) throw std::invalid_argument("loss: size mismatch");
  double ce = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ce -= std::log(std::max(predictions[i][level_index(labels[i])], kProbFloor));
  }
  if (!labels.empty()) ce /= static_cast<double>(labels.size());
  return ce + l2 * model.squared_norm();
}

double loss_and_gradient(const PropagationGraph& pg, const MatrixXd& x, const TrefModel& model,
                         std::span<const TrustEdge> batch, double l2, TrefModel& grad,
                         const DropoutSpec* dropout) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
  ForwardTrace trace;
  const TrustState s = forward(pg, x, model, &trace, dropout);
  grad = model.zeros_like();

  // Head: softmax cross-entropy.
  const MatrixXd f = head_features(s, batch);
  MatrixXd logits = f * model.head.transpose();
  const auto bsz = static_cast<Index>(batch.size());
  MatrixXd dlogits(bsz, kNumLevels);
  double ce = 0.0;
  for (Index b = 0; b < bsz; ++b) {
    std::array<double, kNumLevels> z{};
    for (std::size_t c = 0; c < kNumLevels; ++c) z[c] = logits(b, static_cast<Index>(c));
    const auto p = softmax(z);
    const auto y = level_index(batch[static_cast<std::size_t>(b)].level);
    ce -= std::log(std::max(p[y], kProbFloor));
    for (std::size_t c = 0; c < kNumLevels; ++c) {
      dlogits(b, static_cast<Index>(c)) = (p[c] - (c == y ? 1.0 : 0.0)) / static_cast<double>(bsz);
    }
  }
  ce /= static_cast<double>(bsz);
  grad.head = dlogits.transpose() * f;
  const MatrixXd df = dlogits * model.head;

  const Index d = s.final_out().cols();
  MatrixXd dh_out = MatrixXd::Zero(s.final_out().rows(), d);
  MatrixXd dh_in = MatrixXd::Zero(s.final_in().rows(), d);
  for (Index b = 0; b < bsz; ++b) {
    const auto& e = batch[static_cast<std::size_t>(b)];
    dh_out.row(e.src) += df.row(b).head(d);
    dh_in.row(e.dst) += df.row(b).tail(d);
  }

  const auto e_dim = static_cast<Index>(model.edge_dim);
  for (std::size_t li = model.layers.size(); li-- > 0;) {
    const auto& p = model.layers[li];
    auto& gp = grad.layers[li];
    for (const bool out_channel : {true, false}) {
      MatrixXd& dh = out_channel ? dh_out : dh_in;
      const auto& mask = (out_channel ? trace.mask_out : trace.mask_in)[li];
      const auto& pre = (out_channel ? trace.pre_out : trace.pre_in)[li];
      const auto& agg = (out_channel ? trace.agg_out : trace.agg_in)[li];
      const auto& w = out_channel ? p.w_out : p.w_in;
      const auto& mean = out_channel ? pg.out_mean : pg.in_mean;
      const auto& hist = out_channel ? pg.out_hist : pg.in_hist;
      const auto& hist_x = out_channel ? pg.out_hist_expert : pg.in_hist_expert;

      MatrixXd dpre = dh;
      if (mask.size() > 0) dpre = dpre.cwiseProduct(mask);
      dpre = dpre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());

      (out_channel ? gp.w_out : gp.w_in) = dpre.transpose() * agg;
      (out_channel ? gp.b_out : gp.b_in) = dpre.colwise().sum();
      const MatrixXd dagg = dpre * w;
      const Index prev = agg.cols() - e_dim;
      const MatrixXd dedge = dagg.rightCols(e_dim);
      (out_channel ? gp.edge_out : gp.edge_in) = dedge.transpose() * hist;
      if (model.shared_expert_weights) {
        (out_channel ? gp.edge_out : gp.edge_in) += dedge.transpose() * hist_x;
      } else {
        (out_channel ? gp.edge_out_expert : gp.edge_in_expert) = dedge.transpose() * hist_x;
      }
      if (li > 0) dh = mean.transpose() * dagg.leftCols(prev);
    }
  }

  auto params = model.tensors();
  auto grads = grad.tensors();
  double reg = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    reg += params[i]->squaredNorm();
    *grads[i] += 2.0 * l2 * *params[i];
  }
  return ce + l2 * reg;
}

}  // namespace cmcs
