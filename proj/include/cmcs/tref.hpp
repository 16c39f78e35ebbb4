#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmcs/embed_init.hpp"
#include "cmcs/expert_knowledge.hpp"
#include "cmcs/graph_store.hpp"

namespace cmcs {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Message-passing structure over the base edges plus expert edges.
///
/// Row u of `out_mean` holds 1/outdeg(u) at every out-neighbor v, so
/// out_mean * H is the out-degree mean of neighbor states. `in_mean` is the
/// same over in-neighbors. The level histograms are the matching means of the
/// one-hot edge levels, split into observed and expert edges so the edge-type
/// embedding reduces to hist * W^T.
struct PropagationGraph {
  std::size_t num_nodes{0};
  SparseMatrix out_mean;
  SparseMatrix in_mean;
  Eigen::MatrixXd out_hist;         // N x 4, observed edges
  Eigen::MatrixXd in_hist;
  Eigen::MatrixXd out_hist_expert;  // N x 4, expert edges
  Eigen::MatrixXd in_hist_expert;
};

PropagationGraph build_propagation_graph(const TrustGraph& base, std::span<const ExpertEdge> experts);

struct LayerParams {
  Eigen::MatrixXd edge_out;         // edge_dim x 4
  Eigen::MatrixXd edge_in;          // edge_dim x 4
  Eigen::MatrixXd edge_out_expert;  // edge_dim x 4, empty when weights are shared
  Eigen::MatrixXd edge_in_expert;
  Eigen::MatrixXd w_out;            // dim x (prev_dim + edge_dim)
  Eigen::MatrixXd b_out;            // 1 x dim
  Eigen::MatrixXd w_in;
  Eigen::MatrixXd b_in;
};

struct TrefModel {
  std::size_t input_dim{0};
  std::size_t edge_dim{16};
  std::vector<std::size_t> layer_dims;
  bool shared_expert_weights{true};
  std::vector<LayerParams> layers;
  Eigen::MatrixXd head;  // 4 x (2 * last_dim), no bias

  /// Glorot-uniform weights, zero biases.
  static TrefModel init(std::size_t input_dim, std::vector<std::size_t> layer_dims,
                        std::size_t edge_dim, std::uint64_t seed, bool shared_expert_weights = true);

  /// Same shapes, all zeros.
  TrefModel zeros_like() const;

  /// Every trainable tensor in a fixed order (used by Adam, L2 and gradient checks).
  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;
  std::vector<std::string> tensor_names() const;

  std::size_t output_dim() const { return layer_dims.empty() ? input_dim : layer_dims.back(); }
  double squared_norm() const;
  bool all_finite() const;
};

/// h_out[l] / h_in[l] for l = 0..L; layer 0 is the input embedding.
struct TrustState {
  std::vector<Eigen::MatrixXd> h_out;
  std::vector<Eigen::MatrixXd> h_in;

  const Eigen::MatrixXd& final_out() const { return h_out.back(); }
  const Eigen::MatrixXd& final_in() const { return h_in.back(); }
};

/// Intermediate values kept for the backward pass.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> agg_out, agg_in;  // per layer input to the affine map
  std::vector<Eigen::MatrixXd> pre_out, pre_in;  // pre-activation
  std::vector<Eigen::MatrixXd> mask_out, mask_in;  // dropout scale (empty when no dropout)
};

struct DropoutSpec {
  double rate{0.0};
  std::uint64_t seed{0};
};

/// Stacked reinforcement-convolution layers. Throws std::runtime_error naming the
/// layer and node if any activation is non-finite.
TrustState forward(const PropagationGraph& pg, const Eigen::MatrixXd& x, const TrefModel& model,
                   ForwardTrace* trace = nullptr, const DropoutSpec* dropout = nullptr);

struct LevelPrediction {
  std::array<double, kNumLevels> probs{};
  TrustLevel level{TrustLevel::Observer};
};

/// argmax with ties going to the lower level.
TrustLevel argmax_level(const std::array<double, kNumLevels>& probs);

std::array<double, kNumLevels> softmax(const std::array<double, kNumLevels>& logits);

LevelPrediction predict_level(const TrustState& state, const TrefModel& model, NodeIndex src,
                              NodeIndex dst);
LevelPrediction predict_level(const Eigen::MatrixXd& final_out, const Eigen::MatrixXd& final_in,
                              const TrefModel& model, NodeIndex src, NodeIndex dst);

/// Mean negative log-probability of the true levels (probabilities clamped at
/// 1e-12) plus l2 * ||Theta||^2.
double loss(std::span<const std::array<double, kNumLevels>> predictions,
            std::span<const TrustLevel> labels, double l2, const TrefModel& model);

/// Loss over `batch` and its gradient with respect to every model tensor.
double loss_and_gradient(const PropagationGraph& pg, const Eigen::MatrixXd& x,
                         const TrefModel& model, std::span<const TrustEdge> batch, double l2,
                         TrefModel& grad, const DropoutSpec* dropout = nullptr);

struct TrainConfig {
  double lr{0.01};
  double dropout{0.0};
  double l2{1e-5};
  std::size_t epochs{300};
  std::uint64_t seed{1};
  std::vector<std::size_t> layer_dims{64, 64, 64};
  std::size_t edge_dim{16};
  std::size_t batch_size{1024};
  std::size_t patience{20};            // 0 disables early stopping
  double validation_fraction{0.1};     // carved from the train split; 0 = monitor train loss
  bool shared_expert_weights{true};
  double beta1{0.9};
  double beta2{0.999};
  double adam_eps{1e-8};
  std::optional<double> expert_pr;     // override the estimated Bernoulli probability
};

struct TrainResult {
  TrefModel model;
  TrustGraph message_graph;            // observed edges used for propagation
  std::vector<ExpertEdge> experts;
  PrEstimate pr;
  TrustState state;                    // final-layer states of the returned model
  std::vector<double> train_loss;      // per epoch, over the labeled edges
  std::vector<double> monitor_loss;    // per epoch, validation (or train) loss
  std::size_t best_epoch{0};
  bool diverged{false};
};

/// Adam on the cross-entropy objective. use_expert = false is the ablation
/// without synthesized edges.
TrainResult train(const TrustGraph& g, const EdgeSplit& split, const EmbeddingTable& emb,
                  const TrainConfig& cfg, bool use_expert);

/// s = (t_ij + t_ji) * exp(-|t_ij - t_ji|).
double trust_benefit(double t_ij, double t_ji);

/// 1 when the ordered pair is an observed edge, the model accuracy otherwise.
double pair_auc(NodeIndex src, NodeIndex dst, const TrustGraph& g, double model_accuracy);

/// Trained model plus frozen final states; immutable and safe to share.
class TrustEvaluator {
 public:
  TrustEvaluator() = default;
  TrustEvaluator(TrefModel model, TrustState state, TrustGraph observed, TrustGraph message_graph,
                 double accuracy);

  const TrefModel& model() const { return model_; }
  const TrustGraph& observed() const { return observed_; }
  const TrustGraph& message_graph() const { return message_graph_; }
  double accuracy() const { return accuracy_; }
  std::size_t num_nodes() const { return observed_.num_nodes(); }

  LevelPrediction predict(NodeIndex src, NodeIndex dst) const;

  /// Pairs must not be edges of the message graph (std::invalid_argument).
  std::vector<LevelPrediction> evaluate_pairs(std::span<const std::pair<NodeIndex, NodeIndex>> pairs) const;

  /// Observed level when the edge exists, otherwise the predicted level.
  TrustLevel level_between(NodeIndex src, NodeIndex dst) const;

  const Eigen::MatrixXd& final_out() const { return out_; }
  const Eigen::MatrixXd& final_in() const { return in_; }

  void save(const std::filesystem::path& path) const;
  static TrustEvaluator load(const std::filesystem::path& path);

 private:
  TrefModel model_;
  Eigen::MatrixXd out_, in_;
  TrustGraph observed_;
  TrustGraph message_graph_;
  double accuracy_{1.0};
};

}  // namespace cmcs
