#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include "cmcs/tref.hpp"

namespace cmcs {

namespace {

using Eigen::MatrixXd;

struct AdamState {
  TrefModel m, v;
  std::size_t step{0};
};

void adam_step(TrefModel& model, const TrefModel& grad, AdamState& st, const TrainConfig& cfg) {
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  auto params = model.tensors();
  auto grads = grad.tensors();
  auto ms = st.m.tensors();
  auto vs = st.v.tensors();
  for (std::size_t i = 0; i < params.size(); ++i) {
    *ms[i] = cfg.beta1 * *ms[i] + (1.0 - cfg.beta1) * *grads[i];
    *vs[i] = cfg.beta2 * *vs[i] + (1.0 - cfg.beta2) * grads[i]->cwiseProduct(*grads[i]);
    const auto mhat = ms[i]->array() / c1;
    const auto vhat = vs[i]->array() / c2;
    params[i]->array() -= cfg.lr * mhat / (vhat.sqrt() + cfg.adam_eps);
  }
}

double dataset_loss(const PropagationGraph& pg, const MatrixXd& x, const TrefModel& model,
                    std::span<const TrustEdge> edges, double l2) {
  const TrustState s = forward(pg, x, model);
  std::vector<std::array<double, kNumLevels>> preds;
  std::vector<TrustLevel> labels;
  preds.reserve(edges.size());
  labels.reserve(edges.size());
  for (const auto& e : edges) {
    preds.push_back(predict_level(s, model, e.src, e.dst).probs);
    labels.push_back(e.level);
  }
  return loss(preds, labels, l2, model);
}

}  // namespace

TrainResult train(const TrustGraph& g, const EdgeSplit& split, const EmbeddingTable& emb,
                  const TrainConfig& cfg, bool use_expert) {
  if (split.train.empty()) throw std::invalid_argument("train: empty training split");
  if (!(cfg.lr > 0.0) || cfg.l2 < 0.0) throw std::invalid_argument("train: lr > 0 and l2 >= 0 required");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw std::invalid_argument("train: dropout in [0,1)");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");

  std::mt19937_64 rng(mix_seed(cfg.seed, 0x7ef));
  std::vector<TrustEdge> labeled = split.train;
  std::vector<TrustEdge> validation;
  if (cfg.validation_fraction > 0.0) {
    std::shuffle(labeled.begin(), labeled.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(labeled.size())));
    if (n_val > 0 && n_val < labeled.size()) {
      validation.assign(labeled.end() - static_cast<std::ptrdiff_t>(n_val), labeled.end());
      labeled.resize(labeled.size() - n_val);
    }
    std::sort(labeled.begin(), labeled.end(), [](const TrustEdge& a, const TrustEdge& b) {
      return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
  }

  TrainResult r;
  r.message_graph = g.with_edges(labeled);
  if (use_expert) {
    r.pr = estimate_pr(r.message_graph);
    if (cfg.expert_pr) r.pr.pr = *cfg.expert_pr;
    r.experts = generate_expert_knowledge(r.message_graph, {r.pr.pr, mix_seed(cfg.seed, 0xe4)});
  }
  const PropagationGraph pg = build_propagation_graph(r.message_graph, r.experts);
  const MatrixXd x = align_embeddings(emb, g).vectors;

  r.model = TrefModel::init(static_cast<std::size_t>(x.cols()), cfg.layer_dims, cfg.edge_dim,
                            mix_seed(cfg.seed, 0x1417), cfg.shared_expert_weights);
  AdamState adam{r.model.zeros_like(), r.model.zeros_like(), 0};
  TrefModel best = r.model;
  double best_monitor = std::numeric_limits<double>::infinity();
  TrefModel grad;

  std::vector<TrustEdge> order = labeled;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const TrefModel checkpoint = r.model;
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const TrustEdge> batch(order.data() + start, end - start);
      const DropoutSpec drop{cfg.dropout, mix_seed(cfg.seed, adam.step + 1)};
      const double l = loss_and_gradient(pg, x, r.model, batch, cfg.l2, grad, &drop);
      if (!std::isfinite(l)) {
        std::cerr << "train: non-finite loss at epoch " << epoch + 1
                  << "; restoring the last finite checkpoint\n";
        r.model = checkpoint;
        r.diverged = true;
        break;
      }
      epoch_loss += l * static_cast<double>(batch.size());
      adam_step(r.model, grad, adam, cfg);
    }
    if (r.diverged || !r.model.all_finite()) {
      r.model = checkpoint;
      r.diverged = true;
      break;
    }
    r.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    const double monitor =
        validation.empty() ? r.train_loss.back() : dataset_loss(pg, x, r.model, validation, cfg.l2);
    r.monitor_loss.push_back(monitor);
    if (monitor < best_monitor) {
      best_monitor = monitor;
      best = r.model;
      r.best_epoch = epoch + 1;
    }
    if (cfg.patience > 0 && epoch + 1 - r.best_epoch >= cfg.patience) break;
  }
  if (r.best_epoch > 0) r.model = best;
  r.state = forward(pg, x, r.model);
  return r;
}

double trust_benefit(double t_ij, double t_ji) {
  return (t_ij + t_ji) * std::exp(-std::abs(t_ij - t_ji));
}

double pair_auc(NodeIndex src, NodeIndex dst, const TrustGraph& g, double model_accuracy) {
  if (!(model_accuracy > 0.0 && model_accuracy <= 1.0)) {
    throw std::invalid_argument("pair_auc: accuracy must lie in (0, 1]");
  }
  return g.has_edge(src, dst) ? 1.0 : model_accuracy;
}

TrustEvaluator::TrustEvaluator(TrefModel model, TrustState state, TrustGraph observed,
                               TrustGraph message_graph, double accuracy)
    : model_(std::move(model)),
      out_(state.final_out()),
      in_(state.final_in()),
      observed_(std::move(observed)),
      message_graph_(std::move(message_graph)),
      accuracy_(accuracy) {
  if (static_cast<std::size_t>(out_.rows()) != observed_.num_nodes()) {
    throw std::invalid_argument("TrustEvaluator: state/graph size mismatch");
  }
}

LevelPrediction TrustEvaluator::predict(NodeIndex src, NodeIndex dst) const {
  return predict_level(out_, in_, model_, src, dst);
}

std::vector<LevelPrediction> TrustEvaluator::evaluate_pairs(
    std::span<const std::pair<NodeIndex, NodeIndex>> pairs) const {
  std::vector<LevelPrediction> out;
  out.reserve(pairs.size());
  for (const auto& [src, dst] : pairs) {
    if (message_graph_.has_edge(src, dst)) {
      throw std::invalid_argument("evaluate_pairs: (" + message_graph_.node_id(src) + ", " +
                                  message_graph_.node_id(dst) + ") is a direct edge");
    }
    out.push_back(predict(src, dst));
  }
  return out;
}

TrustLevel TrustEvaluator::level_between(NodeIndex src, NodeIndex dst) const {
  if (auto l = observed_.level(src, dst)) return *l;
  return predict(src, dst).level;
}

}  // namespace cmcs
